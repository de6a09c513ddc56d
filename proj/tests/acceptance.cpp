// Integration suite for the headline behaviors: one PASS/FAIL line per
// criterion. The real-data criterion needs a MovieLens-format ratings file
// supplied via PAF_MOVIELENS and is skipped otherwise.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "brute_oracle.hpp"
#include "chi2.hpp"
#include "paf/bounds.hpp"
#include "paf/core.hpp"
#include "paf/data.hpp"
#include "paf/model.hpp"
#include "paf/rng.hpp"
#include "paf/sim.hpp"
#include "paf/theory.hpp"

using namespace paf;

namespace {

int failures = 0;

void report(int idx, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", idx, detail.c_str());
    if (!pass) ++failures;
}

void skip(int idx, const std::string& detail) {
    std::printf("SKIP criterion %d: %s\n", idx, detail.c_str());
}

void note(const std::string& text) { std::printf("    - %s\n", text.c_str()); }

model::ModelParams fig_params(double alpha, int n = 1000) {
    model::ModelParams params;
    params.n = n;
    params.k = 10;
    params.p = 0.2;
    params.c = 1.0;
    params.alpha = alpha;
    return params;
}

double se_of(const sim::TrialStats& s) {
    if (s.trials <= 0) return 1.0;
    return std::sqrt(s.ber * (1.0 - s.ber) / static_cast<double>(s.trials));
}

double combined_se(const sim::TrialStats& a, const sim::TrialStats& b) {
    return std::sqrt(se_of(a) * se_of(a) + se_of(b) * se_of(b));
}

std::string fmt(double v) { return sim::format_double(v); }

// ---- criterion 1: high-erasure regime reproduces BER 1/2 ----------------

void criterion_1() {
    bool pass = true;
    std::ostringstream detail;
    detail << "high-erasure regime, 2000 trials:";
    for (double alpha : {0.6, 0.7, 0.8}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto stats = sim::estimate_ber(fig_params(alpha), 10, 2000, 1001);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_band = stats.ber >= 0.45 && stats.ber <= 0.55;
        const bool fast = secs < 120.0;
        pass = pass && in_band && fast;
        detail << " alpha=" << alpha << " ber=" << fmt(stats.ber) << " (" << fmt(secs) << "s)";
    }
    report(1, pass, detail.str());
}

// ---- criterion 2: low-erasure, large-cluster regime decays to zero ------

void criterion_2() {
    bool pass = true;
    std::ostringstream detail;
    detail << "dense regime, 2000 trials:";
    sim::TrialStats at015;
    for (double alpha : {0.05, 0.15, 0.25}) {
        const auto stats = sim::estimate_ber(fig_params(alpha), 10, 2000, 1002);
        if (alpha == 0.15) at015 = stats;
        pass = pass && stats.ber <= 0.10;
        detail << " alpha=" << alpha << " ber=" << fmt(stats.ber);
    }
    auto big = fig_params(0.15, 2000);
    const auto stats2000 = sim::estimate_ber(big, 10, 2000, 1002);
    const double tol = 2.0 * combined_se(stats2000, at015);
    const bool trend = stats2000.ber <= at015.ber + tol;
    pass = pass && trend;
    detail << "; n=2000 ber=" << fmt(stats2000.ber) << " vs n=1000 ber=" << fmt(at015.ber)
           << " +2se=" << fmt(at015.ber + tol);
    report(2, pass, detail.str());
}

// ---- criterion 3: intermediate regime is reported, not asserted ---------

void criterion_3() {
    bool pass = true;
    std::ostringstream detail;
    detail << "intermediate regime, 2000 trials:";
    for (double alpha : {0.35, 0.40, 0.45}) {
        const auto params = fig_params(alpha);
        const auto stats = sim::estimate_ber(params, 10, 2000, 1003);
        const auto pred =
            theory::paf_limit_ber(params.p, theory::gamma_of(params.n, params.k, alpha));
        pass = pass && stats.ci_low > 0.0 && stats.ci_high < 0.5;
        detail << " alpha=" << alpha << " ber=" << fmt(stats.ber) << " (limit "
               << fmt(pred.lower) << ")";
    }
    detail << "; asserting only 0 < BER < 1/2 at 95%";
    report(3, pass, detail.str());
}

// ---- criterion 4: the planted cluster size is the best neighborhood -----

void criterion_4() {
    const auto params = fig_params(0.45);
    const auto result = sim::sweep_T(params, {2, 5, 10, 20, 50, 100}, 5000, 1004);
    const sim::SweepRow* at_k = nullptr;
    for (const auto& row : result.rows)
        if (row.swept == 10.0) at_k = &row;
    bool pass = at_k != nullptr;
    std::ostringstream detail;
    detail << "neighborhood-size sweep, 5000 trials:";
    for (const auto& row : result.rows) {
        detail << " T=" << static_cast<int>(row.swept) << ":" << fmt(row.stats.ber);
        if (at_k && row.swept != 10.0) {
            const double tol = 2.0 * combined_se(at_k->stats, row.stats);
            pass = pass && at_k->stats.ber <= row.stats.ber + tol;
        }
    }
    detail << "; argmin T=" << result.argmin_T;
    report(4, pass, detail.str());
}

// ---- criterion 5: limit formulas against hand-evaluated references ------

void criterion_5() {
    bool pass = true;
    const auto f = [](double p, double x) {
        const double a = std::pow(p, x), b = std::pow(1.0 - p, x);
        return a / (a + b);
    };
    const auto non_integer = theory::paf_limit_ber(0.2, 0.3);
    pass = pass && non_integer.exact &&
           std::abs(non_integer.lower - 0.008 / (0.008 + 0.512)) < 1e-6 &&
           std::abs(non_integer.lower - 0.0153846) < 1e-6;
    const auto integer_case = theory::paf_limit_ber(0.2, 0.5);
    pass = pass && !integer_case.exact && std::abs(integer_case.lower - f(0.2, 2.0)) < 1e-9 &&
           std::abs(integer_case.upper - f(0.2, 1.0)) < 1e-9;
    const auto pooled = theory::optimal_limit_ber(0.3, 0.25);
    pass = pass && std::abs(pooled.lower - f(0.3, 4.0)) < 1e-9 &&
           std::abs(pooled.upper - f(0.3, 3.0)) < 1e-9;
    bool monotone = true;
    for (double p : {0.05, 0.2, 0.45}) {
        double prev = theory::ber_of_margin(p, 0.0);
        for (double x = 0.25; x <= 25.0; x += 0.25) {
            const double cur = theory::ber_of_margin(p, x);
            monotone = monotone && cur < prev;
            prev = cur;
        }
    }
    pass = pass && monotone;
    report(5, pass,
           "limit formulas: floor case " + fmt(non_integer.lower) + ", integer interval [" +
               fmt(integer_case.lower) + "," + fmt(integer_case.upper) +
               "], pooled interval [" + fmt(pooled.lower) + "," + fmt(pooled.upper) +
               "], posterior strictly decreasing");
}

// ---- criterion 6: tail bounds dominate exact tails -----------------------

void criterion_6() {
    bool pass = true;
    Rng rng(600);

    int low_mean_checked = 0;
    while (low_mean_checked < 500) {
        const auto n = static_cast<std::int64_t>(1 + rng.below(200));
        const double p = rng.next_double() * 0.3;
        const double floor_t = 2.0 * M_E * static_cast<double>(n) * p;
        if (floor_t >= static_cast<double>(n)) continue;
        const double t = floor_t + (static_cast<double>(n) - floor_t) * rng.next_double();
        if (!(t > floor_t)) continue;
        const double exact =
            bounds::binom_tail_exact(n, p, static_cast<std::int64_t>(std::floor(t)) + 1);
        pass = pass && exact <= bounds::binom_tail_low_mean_bound(n, p, t) + 1e-12;
        ++low_mean_checked;
    }

    int upper_checked = 0, lower_checked = 0, two_sided_checked = 0;
    std::int64_t printed_upper_viol = 0, printed_lower_viol = 0;
    while (upper_checked < 500 || lower_checked < 500 || two_sided_checked < 500) {
        const auto N = static_cast<std::int64_t>(5 + rng.below(2000));
        const auto m = static_cast<std::int64_t>(1 + rng.below(static_cast<std::uint64_t>(N)));
        const auto n = static_cast<std::int64_t>(1 + rng.below(static_cast<std::uint64_t>(N)));
        const bounds::HypergeomParams hp{N, m, n};
        const double p = static_cast<double>(m) / static_cast<double>(N);
        if (upper_checked < 500 && p < 1.0) {
            const double t = rng.next_double() * (1.0 - p) * 0.999;
            if (t > 0.0) {
                const auto thr =
                    static_cast<std::int64_t>(std::ceil((p + t) * static_cast<double>(n) - 1e-9));
                const double exact = bounds::hypergeom_tail_exact(hp, thr);
                pass = pass && bounds::chvatal_upper_strict(hp, t) >= exact - 1e-12;
                printed_upper_viol += bounds::chvatal_upper(hp, t) < exact - 1e-12;
                ++upper_checked;
            }
        }
        if (lower_checked < 500 && p > 0.0) {
            const double t = rng.next_double() * p * 0.999;
            if (t > 0.0) {
                const auto thr =
                    static_cast<std::int64_t>(std::floor((p - t) * static_cast<double>(n) + 1e-9));
                const double exact = bounds::hypergeom_lower_tail_exact(hp, thr);
                pass = pass && bounds::chvatal_lower_strict(hp, t) >= exact - 1e-12;
                printed_lower_viol += bounds::chvatal_lower(hp, t) < exact - 1e-12;
                ++lower_checked;
            }
        }
        if (two_sided_checked < 500) {
            const double mu = hp.mean();
            const double delta = rng.next_double();
            if (mu > 0.0 && delta > 0.0) {
                const auto up = static_cast<std::int64_t>(std::ceil(mu * (1 + delta) - 1e-9));
                const auto down = static_cast<std::int64_t>(std::floor(mu * (1 - delta) + 1e-9));
                const double exact = bounds::hypergeom_tail_exact(hp, up) +
                                     bounds::hypergeom_lower_tail_exact(hp, down);
                pass = pass && exact <= bounds::simple_tail(hp, delta) + 1e-12;
                ++two_sided_checked;
            }
        }
    }

    // Exact tails versus one-million-draw Monte Carlo.
    {
        const std::int64_t draws = 1000000;
        std::int64_t hits = 0;
        for (std::int64_t d = 0; d < draws; ++d) {
            std::int64_t x = 0;
            for (int i = 0; i < 50; ++i) x += rng.bernoulli(0.1);
            hits += x >= 8;
        }
        const double exact = bounds::binom_tail_exact(50, 0.1, 8);
        const double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(draws));
        pass = pass && std::abs(static_cast<double>(hits) / static_cast<double>(draws) - exact) <=
                           3 * sigma;
    }
    {
        const bounds::HypergeomParams hp{60, 24, 30};
        const std::int64_t draws = 1000000;
        std::int64_t hits = 0;
        for (std::int64_t d = 0; d < draws; ++d) {
            std::int64_t x = 0, left = hp.m, rest = hp.N;
            for (std::int64_t i = 0; i < hp.n; ++i) {
                if (rng.below(static_cast<std::uint64_t>(rest)) < static_cast<std::uint64_t>(left)) {
                    ++x;
                    --left;
                }
                --rest;
            }
            hits += x >= 16;
        }
        const double exact = bounds::hypergeom_tail_exact(hp, 16);
        const double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(draws));
        pass = pass && std::abs(static_cast<double>(hits) / static_cast<double>(draws) - exact) <=
                           3 * sigma;
    }

    const double mean = 100000.0 * 0.3;
    const double sd = std::sqrt(100000.0 * 0.3 * 0.7);
    const double ratio =
        bounds::binom_tail_exact(100000, 0.3, static_cast<std::int64_t>(std::ceil(mean + 2 * sd))) /
        bounds::moderate_deviation_q(2.0);
    pass = pass && ratio >= 0.8 && ratio <= 1.25;

    report(6, pass,
           "tail bounds: 500-instance domination per theorem-backed bound, Monte Carlo "
           "agreement, normal-tail ratio " + fmt(ratio));
    note("exponent-free printed tail forms are kept verbatim and are not valid bounds: " +
         std::to_string(printed_upper_viol) + "/500 upper and " +
         std::to_string(printed_lower_viol) +
         "/500 lower counterexamples on this grid; the exponentiated forms dominated "
         "500/500 each");
}

// ---- criterion 7: exhaustive equivalence with the two-step definition ----

void criterion_7() {
    std::int64_t matrices = 0, deterministic_cases = 0, support_cases = 0;
    bool pass = true;
    std::vector<std::pair<brute::TinyMatrix, int>> tied_cases;
    for (int rows = 1; rows <= 3; ++rows) {
        for (int cols = 1; cols <= 4; ++cols) {
            brute::enumerate_matrices(rows, cols, 6, [&](const brute::TinyMatrix& m) {
                const auto candidates = brute::tiny_erased_columns(m, 0);
                if (candidates.empty()) return;
                const auto y = m.to_observed();
                const std::vector<std::int32_t> cands32(candidates.begin(), candidates.end());
                ++matrices;
                for (int T = 1; T <= rows; ++T) {
                    const auto dist = brute::outcome_distribution(m, 0, T, candidates);
                    if (dist.size() == 1) {
                        ++deterministic_cases;
                        for (std::uint64_t seed = 0; seed < 4 && pass; ++seed)
                            pass = core::recommend(y, 0, T, &cands32, seed).item ==
                                   dist.begin()->first;
                    } else {
                        ++support_cases;
                        tied_cases.emplace_back(m, T);
                        for (std::uint64_t seed = 0; seed < 4 && pass; ++seed)
                            pass = dist.count(
                                       core::recommend(y, 0, T, &cands32, seed).item) == 1;
                    }
                }
            });
        }
    }

    // Chi-square on a stratified sample of the tied cases, 10^4 seeds each.
    const std::size_t want = 300;
    std::vector<std::pair<brute::TinyMatrix, int>> sample;
    const std::size_t stride = std::max<std::size_t>(1, tied_cases.size() / want);
    for (std::size_t i = 0; i < tied_cases.size() && sample.size() < want; i += stride)
        sample.push_back(tied_cases[i]);
    int raw_passes = 0;
    bool bonferroni_ok = true;
    for (const auto& [m, T] : sample) {
        const auto candidates = brute::tiny_erased_columns(m, 0);
        const std::vector<std::int32_t> cands32(candidates.begin(), candidates.end());
        const auto y = m.to_observed();
        const auto dist = brute::outcome_distribution(m, 0, T, candidates);
        std::map<int, std::int64_t> observed;
        for (int seed = 0; seed < 10000; ++seed)
            ++observed[core::recommend(y, 0, T, &cands32,
                                       derive_seed(700, static_cast<std::uint64_t>(seed)))
                           .item];
        const double pvalue = chi2::gof_pvalue(observed, dist, 10000);
        raw_passes += pvalue > 0.01;
        bonferroni_ok = bonferroni_ok && pvalue > 0.01 / static_cast<double>(sample.size());
    }
    pass = pass && bonferroni_ok &&
           raw_passes >= static_cast<int>(0.97 * static_cast<double>(sample.size()));
    std::ostringstream detail;
    detail << "two-step definition equivalence: " << matrices << " matrices, "
           << deterministic_cases << " deterministic cases exact, " << support_cases
           << " tied cases support-checked, chi-square " << raw_passes << "/" << sample.size()
           << " at p>0.01 (all above the Bonferroni floor), 10^4 seeds each";
    report(7, pass, detail.str());
}

// ---- criterion 8: true-cluster pooling beats column votes ----------------

void criterion_8() {
    const auto params = fig_params(0.45);
    sim::TrialConfig oracle_cfg;
    oracle_cfg.recommender = sim::RecommenderKind::Oracle;
    const auto oracle = sim::estimate_ber(params, 10, 5000, 1008, 0, oracle_cfg);
    const auto paf_run = sim::estimate_ber(params, 10, 5000, 1008);
    const double tol = 2.0 * combined_se(oracle, paf_run);
    const bool pass = oracle.ber <= paf_run.ber + tol;
    report(8, pass,
           "matched-seed comparison, 5000 trials: oracle ber=" + fmt(oracle.ber) +
               " vs column-vote ber=" + fmt(paf_run.ber) + " (+2se=" + fmt(paf_run.ber + tol) +
               ")");
}

// ---- criterion 9: real-data protocol (conditional) -----------------------

void criterion_9() {
    const char* path = std::getenv("PAF_MOVIELENS");
    if (path == nullptr || !std::ifstream(path).good()) {
        skip(9, "set PAF_MOVIELENS to a MovieLens-format ratings.dat to run the real-data "
                "protocol (not part of the default suite)");
        return;
    }
    bool pass = true;
    const auto loaded = data::load_ratings(path, data::Format::MovieLensDat);
    note("records=" + std::to_string(loaded.records.size()));
    const auto dataset = data::split_train_test(loaded, 0.30, 2001);

    data::EvalConfig paf100;
    paf100.T = 100;
    const auto ber100 = data::eval_ber(dataset, paf100, 2001);
    const double rmse100 = data::eval_rmse(dataset, 100, 2001);
    pass = pass && std::abs(ber100.stats.ber - 0.103) <= 0.015;
    pass = pass && std::abs(rmse100 - 0.748) <= 0.03;
    note("T=100: ber=" + fmt(ber100.stats.ber) + " (target 0.103+-0.015), rmse=" + fmt(rmse100) +
         " (target 0.748+-0.03)");

    data::EvalConfig global;
    global.recommender = data::Recommender::Global;
    const auto gber = data::eval_ber(dataset, global, 2001);
    pass = pass && std::abs(gber.stats.ber - 0.16) <= 0.02;
    note("global popularity: ber=" + fmt(gber.stats.ber) + " (target 0.16+-0.02)");

    const auto filtered = data::filter_popular(dataset, 0.60);
    data::EvalConfig paf55;
    paf55.T = 55;
    const auto fber = data::eval_ber(filtered, paf55, 2001);
    pass = pass && std::abs(fber.stats.ber - 0.321) <= 0.02;
    note("filtered T=55: ber=" + fmt(fber.stats.ber) + " (target 0.321+-0.02)");

    double best = 2.0;
    int best_T = 0;
    for (int T : {10, 100, 500, 2000}) {
        data::EvalConfig cfg;
        cfg.T = T;
        const auto r = data::eval_ber(dataset, cfg, 2001);
        note("T=" + std::to_string(T) + ": ber=" + fmt(r.stats.ber));
        if (r.stats.ber < best) {
            best = r.stats.ber;
            best_T = T;
        }
    }
    pass = pass && best_T == 100;
    report(9, pass, "real-data protocol on " + std::string(path));
    note("a Netflix-era snapshot is not redistributable; its published values are "
         "documentation targets only");
}

// ---- criterion 10: byte-reproducible runs --------------------------------

void criterion_10() {
#ifndef PAF_CLI_PATH
    report(10, false, "CLI path missing at compile time");
#else
    const std::string cli = PAF_CLI_PATH;
    const auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string base = "/tmp/paf_acceptance_";
    bool pass = true;
    const std::string sim_cmd = " simulate --n 400 --k 10 --p 0.2 --alpha 0.5 --T 10 "
                                "--trials 300 --seed 99 --out ";
    pass = pass &&
           std::system((cli + sim_cmd + base + "a.csv --workers 1 >/dev/null").c_str()) == 0;
    pass = pass &&
           std::system((cli + sim_cmd + base + "b.csv --workers 2 >/dev/null").c_str()) == 0;
    pass = pass && slurp(base + "a.csv") == slurp(base + "b.csv");
    const std::string sweep_cmd = " sweep --mode alpha --grid 0.1,0.5,0.7 --n 200 --k 10 "
                                  "--p 0.2 --trials 100 --seed 5 --out ";
    pass = pass &&
           std::system((cli + sweep_cmd + base + "c.csv --workers 1 >/dev/null").c_str()) == 0;
    pass = pass &&
           std::system((cli + sweep_cmd + base + "d.csv --workers 2 >/dev/null").c_str()) == 0;
    pass = pass && slurp(base + "c.csv") == slurp(base + "d.csv");
    pass = pass && !slurp(base + "a.csv.manifest.json").empty();
    report(10, pass, "CLI outputs byte-identical across reruns and worker counts");
#endif
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("acceptance suite finished in %.1fs with %d failing criteria\n", secs, failures);
    return failures == 0 ? 0 : 1;
}

#include "paf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "paf/cluster.hpp"
#include "paf/core.hpp"
#include "paf/rng.hpp"

namespace paf::sim {

WilsonInterval wilson(std::int64_t successes, std::int64_t trials) {
    if (trials <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (successes == 0) ci.low = 0.0;
    if (successes == trials) ci.high = 1.0;
    return ci;
}

int resolve_workers(int workers) {
#ifdef _OPENMP
    return workers > 0 ? workers : omp_get_max_threads();
#else
    (void)workers;
    return 1;
#endif
}

namespace {

bool first_row_cluster_all_zero(const model::LatentModel& latent) {
    for (int j = 0; j < latent.col_clusters; ++j)
        if (latent.cluster_value(0, j)) return false;
    return true;
}

}  // namespace

TrialResult run_trial(const model::ModelParams& params, int T, std::uint64_t seed,
                      const TrialConfig& cfg) {
    params.validate();
    TrialResult res;
    for (int attempt = 0; attempt <= cfg.max_redraws; ++attempt) {
        const std::uint64_t s =
            attempt == 0 ? seed
                         : derive_seed(derive_seed(seed, stream::kRedraw),
                                       static_cast<std::uint64_t>(attempt));
        const auto latent = model::generate_latent(params, s);
        if (cfg.skip_all_zero_first_row && first_row_cluster_all_zero(latent)) {
            ++res.redraws;
            continue;
        }
        const auto y = model::apply_channels(latent, params, s);
        const auto candidates = core::erased_columns(y, 0);
        if (candidates.empty()) {
            ++res.redraws;
            continue;
        }
        const std::uint64_t rec_seed = derive_seed(s, stream::kRecommend);
        core::Recommendation rec;
        switch (cfg.recommender) {
            case RecommenderKind::Paf:
                rec = core::recommend(y, 0, T, &candidates, rec_seed);
                break;
            case RecommenderKind::Global:
                rec = core::recommend_global(y, 0, rec_seed);
                break;
            case RecommenderKind::Oracle:
                rec = cluster::oracle_recommend(latent, y, 0, candidates, rec_seed);
                break;
        }
        res.completed = true;
        res.error = latent.value(0, rec.item) == 0 ? 1 : 0;
        res.neighbor_count = static_cast<std::int64_t>(rec.neighbors.size());
        for (std::int32_t v : rec.neighbors)
            if (latent.row_cluster(v) == 0) ++res.good_neighbors;
        res.vote_ones = rec.vote_ones;
        res.vote_zeros = rec.vote_zeros;
        res.candidate_count = rec.candidate_count;
        return res;
    }
    return res;  // exhausted: completed == false
}

namespace {

struct Accumulator {
    std::int64_t completed = 0;
    std::int64_t errors = 0;
    std::int64_t redraws = 0;
    std::int64_t exhausted = 0;
    std::int64_t neighbors = 0;
    std::int64_t good = 0;
    std::int64_t votes = 0;
};

void absorb(Accumulator& acc, const TrialResult& r) {
    acc.redraws += r.redraws;
    if (!r.completed) {
        ++acc.exhausted;
        return;
    }
    ++acc.completed;
    acc.errors += r.error;
    acc.neighbors += r.neighbor_count;
    acc.good += r.good_neighbors;
    acc.votes += r.vote_ones + r.vote_zeros;
}

TrialStats finish(const Accumulator& acc) {
    TrialStats st;
    st.trials = acc.completed;
    st.errors = acc.errors;
    st.ber = acc.completed > 0 ? static_cast<double>(acc.errors) / static_cast<double>(acc.completed) : 0.0;
    const auto ci = wilson(acc.errors, acc.completed);
    st.ci_low = ci.low;
    st.ci_high = ci.high;
    st.mean_neighbor_purity =
        acc.neighbors > 0 ? static_cast<double>(acc.good) / static_cast<double>(acc.neighbors) : 0.0;
    st.mean_votes_chosen =
        acc.completed > 0 ? static_cast<double>(acc.votes) / static_cast<double>(acc.completed) : 0.0;
    st.discarded = acc.redraws;
    st.exhausted = acc.exhausted;
    return st;
}

}  // namespace

TrialStats estimate_ber(const model::ModelParams& params, int T, std::int64_t trials,
                        std::uint64_t base_seed, int workers, const TrialConfig& cfg) {
    params.validate();
    if (trials < 1) throw domain_error("sim: trials must be >= 1");
    const std::uint64_t trial_base = derive_seed(base_seed, stream::kTrial);
    Accumulator acc;
#ifdef _OPENMP
    const int nw = resolve_workers(workers);
    std::int64_t completed = 0, errors = 0, redraws = 0, exhausted = 0, neighbors = 0, good = 0,
                 votes = 0;
#pragma omp parallel for schedule(dynamic, 8) num_threads(nw) \
    reduction(+ : completed, errors, redraws, exhausted, neighbors, good, votes)
    for (std::int64_t t = 0; t < trials; ++t) {
        const auto r = run_trial(params, T, derive_seed(trial_base, static_cast<std::uint64_t>(t)), cfg);
        redraws += r.redraws;
        if (!r.completed) {
            ++exhausted;
        } else {
            ++completed;
            errors += r.error;
            neighbors += r.neighbor_count;
            good += r.good_neighbors;
            votes += r.vote_ones + r.vote_zeros;
        }
    }
    acc = {completed, errors, redraws, exhausted, neighbors, good, votes};
#else
    (void)workers;
    for (std::int64_t t = 0; t < trials; ++t)
        absorb(acc, run_trial(params, T, derive_seed(trial_base, static_cast<std::uint64_t>(t)), cfg));
#endif
    return finish(acc);
}

TrialStats estimate_ber_serial(const model::ModelParams& params, int T, std::int64_t trials,
                               std::uint64_t base_seed, const TrialConfig& cfg) {
    params.validate();
    if (trials < 1) throw domain_error("sim: trials must be >= 1");
    const std::uint64_t trial_base = derive_seed(base_seed, stream::kTrial);
    Accumulator acc;
    for (std::int64_t t = 0; t < trials; ++t)
        absorb(acc, run_trial(params, T, derive_seed(trial_base, static_cast<std::uint64_t>(t)), cfg));
    return finish(acc);
}

namespace {

std::optional<theory::BerPrediction> phase_prediction(theory::Phase phase, double p, double gamma) {
    switch (phase) {
        case theory::Phase::I: return theory::BerPrediction{0.0, 0.0, true};
        case theory::Phase::II: return theory::paf_limit_ber(p, gamma);
        case theory::Phase::III: return theory::BerPrediction{0.5, 0.5, true};
        case theory::Phase::Boundary: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

std::vector<SweepRow> sweep_alpha(const model::ModelParams& base, const std::vector<double>& alphas,
                                  std::int64_t trials, std::uint64_t base_seed, int workers) {
    std::vector<SweepRow> rows;
    rows.reserve(alphas.size());
    for (double alpha : alphas) {
        SweepRow row;
        row.swept = alpha;
        model::ModelParams params = base;
        params.alpha = alpha;
        try {
            params.validate();
            row.phase = theory::phase_classify(params.n, params.k, alpha);
            row.prediction =
                phase_prediction(row.phase, params.p, theory::gamma_of(params.n, params.k, alpha));
            row.stats = estimate_ber(params, params.k, trials, base_seed, workers);
        } catch (const domain_error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

TSweepResult sweep_T(const model::ModelParams& params, const std::vector<int>& t_grid,
                     std::int64_t trials, std::uint64_t base_seed, int workers) {
    params.validate();
    TSweepResult result;
    const auto phase = theory::phase_classify(params.n, params.k, params.alpha);
    const auto prediction =
        phase_prediction(phase, params.p, theory::gamma_of(params.n, params.k, params.alpha));
    double best = 2.0;
    for (int T : t_grid) {
        SweepRow row;
        row.swept = static_cast<double>(T);
        row.phase = phase;
        row.prediction = prediction;
        try {
            // The per-trial seed ignores T, so grid points share matrices.
            row.stats = estimate_ber(params, T, trials, base_seed, workers);
            if (row.stats.ber < best) {
                best = row.stats.ber;
                result.argmin_T = T;
            }
        } catch (const domain_error& e) {
            row.error = e.what();
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "swept_value,trials,errors,ber,ci_low,ci_high,theory_low,theory_high,phase\n";
    for (const SweepRow& row : rows) {
        out << format_double(row.swept) << ',';
        if (!row.error.empty()) {
            out << "0,0,nan,nan,nan,,,error\n";
            continue;
        }
        out << row.stats.trials << ',' << row.stats.errors << ',' << format_double(row.stats.ber)
            << ',' << format_double(row.stats.ci_low) << ',' << format_double(row.stats.ci_high)
            << ',';
        if (row.prediction) {
            out << format_double(row.prediction->lower) << ','
                << format_double(row.prediction->upper);
        } else {
            out << ',';
        }
        out << ',' << theory::phase_name(row.phase) << '\n';
    }
    return out.str();
}

std::string stats_csv(const TrialStats& stats) {
    std::ostringstream out;
    out << "trials,errors,ber,ci_low,ci_high,mean_neighbor_purity,mean_votes_chosen,discarded\n"
        << stats.trials << ',' << stats.errors << ',' << format_double(stats.ber) << ','
        << format_double(stats.ci_low) << ',' << format_double(stats.ci_high) << ','
        << format_double(stats.mean_neighbor_purity) << ','
        << format_double(stats.mean_votes_chosen) << ',' << stats.discarded << '\n';
    return out.str();
}

}  // namespace paf::sim

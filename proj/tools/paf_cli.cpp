// Command-line front end: synthetic simulation, parameter sweeps, limit
// formula queries, and rating-file evaluation. Every data-producing run
// writes a CSV plus a JSON manifest; outputs are byte-identical for a given
// config regardless of worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "paf/data.hpp"
#include "paf/model.hpp"
#include "paf/sim.hpp"
#include "paf/theory.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

using ordered_json = nlohmann::ordered_json;

int default_workers() {
    if (const char* env = std::getenv("PAF_WORKERS")) {
        try {
            return std::max(0, std::stoi(env));
        } catch (...) {
            return 0;
        }
    }
    return 0;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw paf::domain_error("cli: cannot write " + path);
    out << content;
}

void write_manifest(const std::string& out_path, const std::string& subcommand,
                    const ordered_json& config, int workers) {
    ordered_json manifest;
    manifest["tool"] = "paf";
    manifest["version"] = kVersion;
    manifest["subcommand"] = subcommand;
    manifest["config"] = config;
    // Runtime block does not affect output bytes.
    manifest["runtime"]["workers"] = workers;
    write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

// Grid syntax: either "a,b,c" or "start:stop:step" (inclusive stop).
std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double start = 0, stop = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(spec);
        if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
            throw paf::domain_error("cli: grid must be 'a,b,c' or 'start:stop:step'");
        for (double v = start; v <= stop + 1e-12; v += step) out.push_back(v);
        return out;
    }
    std::istringstream in(spec);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

struct SimulateArgs {
    paf::model::ModelParams params;
    int T = 10;
    std::int64_t trials = 2000;
    std::uint64_t seed = 1;
    int workers = default_workers();
    std::string out;
    std::string recommender = "paf";
    bool skip_all_zero_row = false;
};

int run_simulate(const SimulateArgs& a) {
    paf::sim::TrialConfig cfg;
    if (a.recommender == "paf") {
        cfg.recommender = paf::sim::RecommenderKind::Paf;
    } else if (a.recommender == "global") {
        cfg.recommender = paf::sim::RecommenderKind::Global;
    } else if (a.recommender == "oracle") {
        cfg.recommender = paf::sim::RecommenderKind::Oracle;
    } else {
        throw paf::domain_error("cli: recommender must be paf, global, or oracle");
    }
    cfg.skip_all_zero_first_row = a.skip_all_zero_row;
    const auto stats = paf::sim::estimate_ber(a.params, a.T, a.trials, a.seed, a.workers, cfg);
    write_file(a.out, paf::sim::stats_csv(stats));
    ordered_json config;
    config["n"] = a.params.n;
    config["k"] = a.params.k;
    config["p"] = a.params.p;
    config["c"] = a.params.c;
    config["alpha"] = a.params.alpha;
    config["rows"] = a.params.rows;
    config["T"] = a.T;
    config["trials"] = a.trials;
    config["seed"] = a.seed;
    config["recommender"] = a.recommender;
    config["skip_all_zero_row"] = a.skip_all_zero_row;
    write_manifest(a.out, "simulate", config, a.workers);
    std::cout << "ber=" << paf::sim::format_double(stats.ber) << " ci=["
              << paf::sim::format_double(stats.ci_low) << ","
              << paf::sim::format_double(stats.ci_high) << "] trials=" << stats.trials
              << " discarded=" << stats.discarded << "\n";
    return 0;
}

struct SweepArgs {
    paf::model::ModelParams params;
    std::string mode = "alpha";
    std::string grid;
    std::int64_t trials = 2000;
    std::uint64_t seed = 1;
    int workers = default_workers();
    int T = 0;  // alpha mode uses T = k
    std::string out;
};

int run_sweep(const SweepArgs& a) {
    const auto grid = parse_grid(a.grid);
    if (grid.empty()) throw paf::domain_error("cli: sweep grid is empty");
    std::string csv;
    ordered_json config;
    config["mode"] = a.mode;
    config["n"] = a.params.n;
    config["k"] = a.params.k;
    config["p"] = a.params.p;
    config["c"] = a.params.c;
    config["trials"] = a.trials;
    config["seed"] = a.seed;
    int argmin_T = -1;
    if (a.mode == "alpha") {
        const auto rows = paf::sim::sweep_alpha(a.params, grid, a.trials, a.seed, a.workers);
        csv = paf::sim::sweep_csv(rows);
        config["grid"] = grid;
    } else if (a.mode == "T") {
        a.params.validate();
        std::vector<int> tgrid;
        tgrid.reserve(grid.size());
        for (double v : grid) tgrid.push_back(static_cast<int>(v));
        const auto result = paf::sim::sweep_T(a.params, tgrid, a.trials, a.seed, a.workers);
        csv = paf::sim::sweep_csv(result.rows);
        argmin_T = result.argmin_T;
        config["alpha"] = a.params.alpha;
        config["grid"] = tgrid;
    } else {
        throw paf::domain_error("cli: sweep mode must be alpha or T");
    }
    write_file(a.out, csv);
    if (argmin_T >= 0) config["argmin_T"] = argmin_T;
    write_manifest(a.out, "sweep", config, a.workers);
    if (argmin_T >= 0) std::cout << "argmin_T=" << argmin_T << "\n";
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

struct TheoryArgs {
    int n = 1000;
    int k = 10;
    double p = 0.2;
    double alpha = 0.0;
    double tol = 1e-9;
};

int run_theory(const TheoryArgs& a) {
    const double gamma = paf::theory::gamma_of(a.n, a.k, a.alpha);
    const auto phase = paf::theory::phase_classify(a.n, a.k, a.alpha, a.tol);
    std::cout << "gamma=" << paf::sim::format_double(gamma)
              << " phase=" << paf::theory::phase_name(phase) << "\n";
    if (phase == paf::theory::Phase::II) {
        const auto pred = paf::theory::paf_limit_ber(a.p, gamma);
        std::cout << "paf_limit_low=" << paf::sim::format_double(pred.lower)
                  << " paf_limit_high=" << paf::sim::format_double(pred.upper)
                  << " exact=" << (pred.exact ? 1 : 0) << "\n";
    } else if (phase == paf::theory::Phase::I) {
        std::cout << "paf_limit_low=0 paf_limit_high=0 exact=1\n";
    } else if (phase == paf::theory::Phase::III) {
        std::cout << "paf_limit_low=0.5 paf_limit_high=0.5 exact=1\n";
    } else {
        std::cout << "paf_limit_low= paf_limit_high= exact=\n";
    }
    const double gamma2 = a.alpha - 2.0 * std::log(static_cast<double>(a.k)) /
                                        std::log(static_cast<double>(a.n));
    if (gamma2 > 0.0 && gamma2 <= 1.0) {
        const auto opt = paf::theory::optimal_limit_ber(a.p, gamma2);
        std::cout << "pooled_gamma=" << paf::sim::format_double(gamma2)
                  << " pooled_limit_low=" << paf::sim::format_double(opt.lower)
                  << " pooled_limit_high=" << paf::sim::format_double(opt.upper) << "\n";
    }
    return 0;
}

struct EvalArgs {
    std::string input;
    std::string format = "movielens-dat";
    int T = 100;
    double hide_frac = 0.30;
    double filter_popular = -1.0;  // <0: off
    std::string recommender = "paf";
    std::string candidates = "hidden";
    int cluster_k = 0;
    std::uint64_t seed = 1;
    int workers = default_workers();
    bool with_rmse = true;
    std::string out;
};

int run_eval(const EvalArgs& a) {
    paf::data::Format fmt;
    if (a.format == "movielens-dat" || a.format == "dat") {
        fmt = paf::data::Format::MovieLensDat;
    } else if (a.format == "csv") {
        fmt = paf::data::Format::Csv;
    } else {
        throw paf::domain_error("cli: format must be movielens-dat or csv");
    }
    const std::uint64_t checksum = paf::data::fnv1a_file(a.input);
    const auto loaded = paf::data::load_ratings(a.input, fmt);
    auto dataset = paf::data::split_train_test(loaded, a.hide_frac, a.seed);
    if (a.filter_popular >= 0.0) dataset = paf::data::filter_popular(dataset, a.filter_popular);

    paf::data::EvalConfig cfg;
    cfg.T = a.T;
    cfg.workers = a.workers;
    cfg.cluster_k = a.cluster_k;
    cfg.candidates_all = a.candidates == "all";
    if (a.candidates != "all" && a.candidates != "hidden")
        throw paf::domain_error("cli: candidates must be hidden or all");
    if (a.recommender == "paf") {
        cfg.recommender = paf::data::Recommender::Paf;
    } else if (a.recommender == "global") {
        cfg.recommender = paf::data::Recommender::Global;
    } else if (a.recommender == "cluster") {
        cfg.recommender = paf::data::Recommender::Cluster;
    } else {
        throw paf::domain_error("cli: recommender must be paf, global, or cluster");
    }

    const auto outcome = paf::data::eval_ber(dataset, cfg, a.seed);
    std::ostringstream csv;
    csv << "metric,value\n";
    csv << "records," << loaded.records.size() << '\n';
    csv << "duplicates_dropped," << loaded.duplicate_count << '\n';
    csv << "users," << dataset.train.n_rows() << '\n';
    csv << "items," << dataset.train.n_cols() << '\n';
    csv << "train_entries," << dataset.train.stored_count() << '\n';
    csv << "test_entries," << dataset.test.size() << '\n';
    csv << "users_scored," << outcome.users_scored << '\n';
    csv << "users_skipped_no_test," << outcome.users_skipped_no_test << '\n';
    csv << "users_skipped_uncheckable," << outcome.users_skipped_uncheckable << '\n';
    csv << "errors," << outcome.stats.errors << '\n';
    csv << "ber," << paf::sim::format_double(outcome.stats.ber) << '\n';
    csv << "ci_low," << paf::sim::format_double(outcome.stats.ci_low) << '\n';
    csv << "ci_high," << paf::sim::format_double(outcome.stats.ci_high) << '\n';
    if (a.with_rmse) {
        const double rmse = paf::data::eval_rmse(dataset, a.T, a.seed, a.workers);
        csv << "rmse," << paf::sim::format_double(rmse) << '\n';
    }
    write_file(a.out, csv.str());

    ordered_json config;
    config["input"] = a.input;
    config["input_fnv1a"] = checksum;
    config["format"] = a.format;
    config["T"] = a.T;
    config["hide_frac"] = a.hide_frac;
    config["filter_popular"] = a.filter_popular;
    config["recommender"] = a.recommender;
    config["candidates"] = a.candidates;
    config["cluster_k"] = a.cluster_k;
    config["seed"] = a.seed;
    config["with_rmse"] = a.with_rmse;
    write_manifest(a.out, "eval", config, a.workers);
    std::cout << "ber=" << paf::sim::format_double(outcome.stats.ber)
              << " users_scored=" << outcome.users_scored << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neighborhood popularity recommender: simulation and evaluation"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo BER estimate on synthetic data");
    sim_cmd->add_option("--n", sim_args.params.n, "matrix side length")->required();
    sim_cmd->add_option("--k", sim_args.params.k, "cluster side length")->required();
    sim_cmd->add_option("--p", sim_args.params.p, "bit-flip probability");
    sim_cmd->add_option("--c", sim_args.params.c, "erasure scale constant");
    sim_cmd->add_option("--alpha", sim_args.params.alpha, "erasure exponent");
    sim_cmd->add_option("--rows", sim_args.params.rows, "row count (0 = square)");
    sim_cmd->add_option("--T", sim_args.T, "neighborhood size")->required();
    sim_cmd->add_option("--trials", sim_args.trials, "Monte Carlo trials");
    sim_cmd->add_option("--seed", sim_args.seed, "base seed");
    sim_cmd->add_option("--workers", sim_args.workers, "worker threads (0 = all)");
    sim_cmd->add_option("--out", sim_args.out, "output CSV path")->required();
    sim_cmd->add_option("--recommender", sim_args.recommender, "paf | global | oracle");
    sim_cmd->add_flag("--skip-all-zero-row", sim_args.skip_all_zero_row,
                      "discard draws whose first latent row is all zeros");

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "BER sweep over alpha or T");
    sweep_cmd->add_option("--mode", sweep_args.mode, "alpha | T")->required();
    sweep_cmd->add_option("--grid", sweep_args.grid, "comma list or start:stop:step")->required();
    sweep_cmd->add_option("--n", sweep_args.params.n)->required();
    sweep_cmd->add_option("--k", sweep_args.params.k)->required();
    sweep_cmd->add_option("--p", sweep_args.params.p);
    sweep_cmd->add_option("--c", sweep_args.params.c);
    sweep_cmd->add_option("--alpha", sweep_args.params.alpha, "fixed alpha for T mode");
    sweep_cmd->add_option("--trials", sweep_args.trials);
    sweep_cmd->add_option("--seed", sweep_args.seed);
    sweep_cmd->add_option("--workers", sweep_args.workers);
    sweep_cmd->add_option("--out", sweep_args.out)->required();

    TheoryArgs theory_args;
    auto* theory_cmd = app.add_subcommand("theory", "phase label and limit BER prediction");
    theory_cmd->add_option("--n", theory_args.n)->required();
    theory_cmd->add_option("--k", theory_args.k)->required();
    theory_cmd->add_option("--p", theory_args.p);
    theory_cmd->add_option("--alpha", theory_args.alpha)->required();
    theory_cmd->add_option("--tol", theory_args.tol);

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate on a ratings file");
    eval_cmd->add_option("--input", eval_args.input, "ratings file")->required();
    eval_cmd->add_option("--format", eval_args.format, "movielens-dat | csv");
    eval_cmd->add_option("--T", eval_args.T);
    eval_cmd->add_option("--hide-frac", eval_args.hide_frac, "per-user hidden fraction");
    eval_cmd->add_option("--filter-popular", eval_args.filter_popular,
                         "drop items with 1-fraction above this (negative = off)");
    eval_cmd->add_option("--recommender", eval_args.recommender, "paf | global | cluster");
    eval_cmd->add_option("--candidates", eval_args.candidates, "hidden | all");
    eval_cmd->add_option("--cluster-k", eval_args.cluster_k, "cluster size for cluster mode");
    eval_cmd->add_option("--seed", eval_args.seed);
    eval_cmd->add_option("--workers", eval_args.workers);
    eval_cmd->add_option("--out", eval_args.out)->required();
    eval_cmd->add_flag("!--no-rmse", eval_args.with_rmse, "skip the RMSE pass");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim_cmd->parsed()) return run_simulate(sim_args);
        if (sweep_cmd->parsed()) return run_sweep(sweep_args);
        if (theory_cmd->parsed()) return run_theory(theory_args);
        if (eval_cmd->parsed()) return run_eval(eval_args);
    } catch (const paf::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

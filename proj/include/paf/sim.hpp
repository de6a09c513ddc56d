#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paf/model.hpp"
#include "paf/theory.hpp"

namespace paf::sim {

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

// 95% score interval for a binomial proportion.
WilsonInterval wilson(std::int64_t successes, std::int64_t trials);

enum class RecommenderKind { Paf, Global, Oracle };

struct TrialConfig {
    RecommenderKind recommender = RecommenderKind::Paf;
    // Discard draws whose first latent row is all zeros (for bounded
    // cluster-count runs where no correct recommendation exists). Off by default.
    bool skip_all_zero_first_row = false;
    int max_redraws = 1000;
};

struct TrialResult {
    bool completed = false;
    int error = 0;  // 1 iff the recommended item's latent value is 0
    std::int64_t redraws = 0;
    std::int64_t neighbor_count = 0;
    std::int64_t good_neighbors = 0;  // neighbors inside the target user's true row cluster
    std::int64_t vote_ones = 0;
    std::int64_t vote_zeros = 0;
    std::int64_t candidate_count = 0;
};

// One generate -> observe -> recommend -> score round for user 0. Candidate
// columns are those erased in row 0; draws with an empty candidate set are
// redrawn under a derived seed and counted.
TrialResult run_trial(const model::ModelParams& params, int T, std::uint64_t seed,
                      const TrialConfig& cfg = {});

struct TrialStats {
    std::int64_t trials = 0;  // completed trials (the BER denominator)
    std::int64_t errors = 0;
    double ber = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    double mean_neighbor_purity = 0.0;
    double mean_votes_chosen = 0.0;  // unerased votes (ones + zeros) in the chosen column
    std::int64_t discarded = 0;      // redrawn attempts across all trials
    std::int64_t exhausted = 0;      // trials that ran out of redraws
};

// Monte Carlo BER estimate over per-trial seeds derive(derive(base, kTrial), t).
// All accumulation is integral, so the result is identical for any worker
// count and for the serial reference below.
TrialStats estimate_ber(const model::ModelParams& params, int T, std::int64_t trials,
                        std::uint64_t base_seed, int workers = 0, const TrialConfig& cfg = {});

// Plain-loop reference implementation; kept for testing and benchmarking.
TrialStats estimate_ber_serial(const model::ModelParams& params, int T, std::int64_t trials,
                               std::uint64_t base_seed, const TrialConfig& cfg = {});

struct SweepRow {
    double swept = 0.0;
    TrialStats stats;
    theory::Phase phase = theory::Phase::Boundary;
    std::optional<theory::BerPrediction> prediction;
    std::string error;  // non-empty when the point's parameter set was rejected
};

// One BER estimate per alpha with the matching limit prediction; parameter
// errors are recorded in-row and the sweep continues.
std::vector<SweepRow> sweep_alpha(const model::ModelParams& base, const std::vector<double>& alphas,
                                  std::int64_t trials, std::uint64_t base_seed, int workers = 0);

struct TSweepResult {
    std::vector<SweepRow> rows;
    int argmin_T = -1;
};

TSweepResult sweep_T(const model::ModelParams& params, const std::vector<int>& t_grid,
                     std::int64_t trials, std::uint64_t base_seed, int workers = 0);

// CSV with the fixed header
// swept_value,trials,errors,ber,ci_low,ci_high,theory_low,theory_high,phase
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Single-row CSV for one estimate.
std::string stats_csv(const TrialStats& stats);

std::string format_double(double v);

int resolve_workers(int workers);

}  // namespace paf::sim

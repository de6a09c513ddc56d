#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "paf/cluster.hpp"
#include "paf/model.hpp"
#include "paf/sim.hpp"

namespace paf::data {

struct RatingRecord {
    std::int32_t user = 0;  // dense index after loading
    std::int32_t item = 0;
    std::int32_t rating = 0;  // raw 1..5
    std::int64_t timestamp = 0;
};

enum class Format { MovieLensDat, Csv };

struct LoadResult {
    std::vector<RatingRecord> records;       // duplicates resolved, dense ids
    std::vector<std::int64_t> user_ids;      // dense index -> original id
    std::vector<std::int64_t> item_ids;
    std::int64_t duplicate_count = 0;        // (user, item) repeats; last kept
};

// Parses "UserID::MovieID::Rating::Timestamp" lines or the CSV equivalent
// "user,item,rating[,timestamp]". Ratings must be integers in [1, 5].
// Malformed lines fail with their line number.
LoadResult load_ratings(const std::string& path, Format format);
LoadResult parse_ratings(std::istream& in, Format format, const std::string& origin);

// 4 and 5 mean "liked"; 1, 2, 3 mean "not liked".
inline int quantize_rating(int raw) { return raw >= 4 ? 1 : 0; }

struct TestEntry {
    std::int32_t user = 0;
    std::int32_t item = 0;
    std::int8_t bin = 0;
    std::int32_t raw = 0;
};

struct SplitDataset {
    model::ObservedMatrix train;            // quantized training ratings
    std::vector<TestEntry> test;            // hidden entries, disjoint from train
    std::vector<std::int64_t> user_ids;
    std::vector<std::int64_t> item_ids;
};

// Hides floor(hide_frac * count) ratings per user, uniformly at random.
SplitDataset split_train_test(const LoadResult& loaded, double hide_frac, std::uint64_t seed);

// Drops items whose training 1-fraction strictly exceeds the threshold, then
// re-indexes the remaining items (test entries of dropped items go too).
SplitDataset filter_popular(const SplitDataset& dataset, double threshold);

enum class Recommender { Paf, Global, Cluster };

struct EvalConfig {
    int T = 100;
    Recommender recommender = Recommender::Paf;
    // false: candidates are the user's hidden test items (always checkable).
    // true: candidates are all unrated items; recommendations that land
    // outside the hidden set cannot be checked and skip the user.
    bool candidates_all = false;
    int cluster_k = 0;  // required for Recommender::Cluster
    int workers = 0;
};

struct EvalOutcome {
    sim::TrialStats stats;
    std::int64_t users_scored = 0;
    std::int64_t users_skipped_no_test = 0;
    std::int64_t users_skipped_uncheckable = 0;
};

// One recommendation per user with at least one hidden item; an error is a
// recommended item whose true quantized rating is 0.
EvalOutcome eval_ber(const SplitDataset& dataset, const EvalConfig& cfg, std::uint64_t seed);

// Majority-vote per-entry prediction mapped to 2.0 / 4.5 against raw ratings.
double eval_rmse(const SplitDataset& dataset, int T, std::uint64_t seed, int workers = 0);

std::uint64_t fnv1a_file(const std::string& path);

}  // namespace paf::data

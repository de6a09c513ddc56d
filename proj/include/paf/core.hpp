#pragma once

#include <cstdint>
#include <vector>

#include "paf/model.hpp"

namespace paf::core {

struct Recommendation {
    int item = -1;
    std::int64_t vote_ones = 0;   // 1-votes for the chosen column among the neighbors
    std::int64_t vote_zeros = 0;  // 0-votes for the chosen column
    std::vector<std::int32_t> neighbors;
    std::int64_t candidate_count = 0;
};

// Number of columns where rows i and j are both unerased and agree.
std::int64_t similarity(const model::ObservedMatrix& y, int i, int j);

// Agreement counts of `row` against every row, via a walk over the column
// lists of its unerased entries. out[row] equals the row's support size.
std::vector<std::int64_t> similarities_to_all(const model::ObservedMatrix& y, int row);

// Same, transposed: agreement counts of `col` against every column.
std::vector<std::int64_t> col_similarities_to_all(const model::ObservedMatrix& y, int col);

// The T rows most similar to `user`, self included. Rows tied at the cutoff
// are chosen uniformly at random, except that the user's own row is never
// displaced by a tie. Deterministic given the seed.
std::vector<std::int32_t> top_neighbors(const model::ObservedMatrix& y, int user, int T,
                                        std::uint64_t seed);

// Columns of `row` with no stored entry, ascending.
std::vector<std::int32_t> erased_columns(const model::ObservedMatrix& y, int row);

// Among the candidate columns (default: columns erased in the user's row),
// picks the one with the most 1s across the user's top-T rows; ties broken
// uniformly at random.
Recommendation recommend(const model::ObservedMatrix& y, int user, int T,
                         const std::vector<std::int32_t>* candidates, std::uint64_t seed);

// Majority bit at `item` over the top-T rows' unerased entries there.
// Ties and vote-less columns fall back to `tie_fallback`.
int predict_entry(const model::ObservedMatrix& y, int user, int item, int T, std::uint64_t seed,
                  int tie_fallback = 1);

// recommend() with T equal to the number of rows.
Recommendation recommend_global(const model::ObservedMatrix& y, int user, std::uint64_t seed);

}  // namespace paf::core

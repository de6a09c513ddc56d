#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "paf/core.hpp"
#include "paf/model.hpp"

namespace paf::cluster {

// Disjoint covering assignment of row or column indices to dense cluster ids.
struct Partition {
    std::vector<std::int32_t> assignment;  // index -> cluster id in [0, cluster_count)
    int cluster_count = 0;
    bool degenerate = false;  // input had no stored entries; collapsed to one cluster

    // Text format: one "index cluster_id" line per index.
    std::string to_text() const;
    static Partition from_text(std::istream& in);
    static Partition from_text(const std::string& text);
};

enum class Axis { Rows, Columns };

// Clusters one axis by mutual k-nearest-neighbor agreement: each index keeps
// its k most similar indices (self forced, ties by index), an edge connects
// mutual pairs, and connected components become clusters. Components larger
// than k are split greedily: repeatedly seed at the smallest remaining index
// and peel off its k-1 most similar members. Exact under clean separation,
// graceful under noise. An all-erased matrix yields one flagged cluster.
Partition estimate_partition(const model::ObservedMatrix& y, int k, Axis axis);

// Picks the column cluster whose block against the user's row cluster holds
// the most 1s (ties random), then a uniformly random candidate inside it.
// If no cluster contains a candidate the choice falls back to a uniform
// random candidate.
core::Recommendation recommend_by_cluster(const model::ObservedMatrix& y, const Partition& rows,
                                          const Partition& cols, int user,
                                          const std::vector<std::int32_t>& candidates,
                                          std::uint64_t seed);

// recommend_by_cluster with the generator's true partitions.
core::Recommendation oracle_recommend(const model::LatentModel& latent,
                                      const model::ObservedMatrix& y, int user,
                                      const std::vector<std::int32_t>& candidates,
                                      std::uint64_t seed);

Partition true_partition(const model::LatentModel& latent, Axis axis);

}  // namespace paf::cluster

#include "paf/cluster.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "paf/rng.hpp"

namespace paf::cluster {

using model::Cell;
using model::ObservedMatrix;

std::string Partition::to_text() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        out << i << ' ' << assignment[i] << '\n';
    return out.str();
}

Partition Partition::from_text(std::istream& in) {
    Partition part;
    std::int64_t index, cid;
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    while (in >> index >> cid) pairs.emplace_back(index, cid);
    if (!in.eof() && in.fail()) throw domain_error("partition: malformed line");
    part.assignment.assign(pairs.size(), -1);
    for (auto [i, c] : pairs) {
        if (i < 0 || i >= static_cast<std::int64_t>(pairs.size()))
            throw domain_error("partition: index out of range");
        if (part.assignment[static_cast<std::size_t>(i)] != -1)
            throw domain_error("partition: duplicate index");
        part.assignment[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(c);
    }
    const std::int32_t count =
        part.assignment.empty()
            ? 0
            : *std::max_element(part.assignment.begin(), part.assignment.end()) + 1;
    std::vector<bool> seen(static_cast<std::size_t>(count), false);
    for (std::int32_t c : part.assignment) {
        if (c < 0 || c >= count) throw domain_error("partition: cluster id out of range");
        seen[static_cast<std::size_t>(c)] = true;
    }
    for (bool s : seen)
        if (!s) throw domain_error("partition: cluster ids must be dense");
    part.cluster_count = count;
    return part;
}

Partition Partition::from_text(const std::string& text) {
    std::istringstream in(text);
    return from_text(in);
}

namespace {

std::int64_t axis_similarity(const ObservedMatrix& y, Axis axis, int i, int j) {
    auto a = axis == Axis::Rows ? y.row(i) : y.col(i);
    auto b = axis == Axis::Rows ? y.row(j) : y.col(j);
    std::int64_t agree = 0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia].index < b[ib].index) {
            ++ia;
        } else if (a[ia].index > b[ib].index) {
            ++ib;
        } else {
            agree += a[ia].bit == b[ib].bit;
            ++ia;
            ++ib;
        }
    }
    return agree;
}

// Indices of `pool` ordered by (similarity to pivot desc, index asc).
std::vector<std::int32_t> by_similarity(const ObservedMatrix& y, Axis axis, std::int32_t pivot,
                                        const std::vector<std::int32_t>& pool,
                                        const std::vector<std::int64_t>* sims_to_all) {
    std::vector<std::pair<std::int64_t, std::int32_t>> keyed;
    keyed.reserve(pool.size());
    for (std::int32_t j : pool) {
        const std::int64_t s = sims_to_all ? (*sims_to_all)[static_cast<std::size_t>(j)]
                                           : axis_similarity(y, axis, pivot, j);
        keyed.emplace_back(s, j);
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::int32_t> out;
    out.reserve(keyed.size());
    for (const auto& [s, j] : keyed) out.push_back(j);
    return out;
}

}  // namespace

namespace {

// Pooled majority profiles per cluster: signed vote v1 - v0 per column.
struct Profiles {
    int width = 0;
    std::vector<std::int32_t> ones;
    std::vector<std::int32_t> zeros;

    void build(const ObservedMatrix& y, Axis axis, const std::vector<std::int32_t>& assignment,
               int cluster_count) {
        width = axis == Axis::Rows ? y.n_cols() : y.n_rows();
        ones.assign(static_cast<std::size_t>(cluster_count) * width, 0);
        zeros.assign(static_cast<std::size_t>(cluster_count) * width, 0);
        for (std::size_t i = 0; i < assignment.size(); ++i) {
            if (assignment[i] < 0) continue;
            const auto g = static_cast<std::size_t>(assignment[i]);
            for (const Cell& cell :
                 axis == Axis::Rows ? y.row(static_cast<int>(i)) : y.col(static_cast<int>(i))) {
                const std::size_t at = g * width + static_cast<std::size_t>(cell.index);
                if (cell.bit) {
                    ++ones[at];
                } else {
                    ++zeros[at];
                }
            }
        }
    }

    // Agreements minus disagreements of one index against a cluster's
    // majority votes; the index's own entries are excluded when it already
    // belongs to that cluster.
    std::int64_t score(const ObservedMatrix& y, Axis axis, int i, std::int32_t g,
                       std::int32_t current) const {
        std::int64_t s = 0;
        for (const Cell& cell : axis == Axis::Rows ? y.row(i) : y.col(i)) {
            const std::size_t at =
                static_cast<std::size_t>(g) * width + static_cast<std::size_t>(cell.index);
            std::int32_t v1 = ones[at];
            std::int32_t v0 = zeros[at];
            if (g == current) {
                if (cell.bit) {
                    --v1;
                } else {
                    --v0;
                }
            }
            if (v1 == v0) continue;
            s += (v1 > v0) == (cell.bit != 0) ? 1 : -1;
        }
        return s;
    }
};

// Capacity-balanced profile refinement. Buckets hold at most k members
// (every bucket is non-empty by pigeonhole since (R-1)k < m); rows are
// placed best-first by their confidence margin against profiles frozen at
// the start of the pass. Pooling k members sharpens the per-pair similarity
// separation by about sqrt(k), which the seed graph alone lacks at moderate
// sizes, and the capacity keeps distinct planted clusters from collapsing
// into one attractor.
void refine_balanced(const ObservedMatrix& y, Axis axis, std::vector<std::int32_t>& assignment,
                     int cluster_count, int k) {
    const int m = static_cast<int>(assignment.size());
    Profiles profiles;
    struct RowOrder {
        std::int64_t margin;
        std::int32_t row;
    };
    std::vector<RowOrder> order(static_cast<std::size_t>(m));
    std::vector<std::int32_t> next(static_cast<std::size_t>(m));
    std::vector<std::int32_t> capacity(static_cast<std::size_t>(cluster_count));
    for (int pass = 0; pass < 10; ++pass) {
        profiles.build(y, axis, assignment, cluster_count);
#pragma omp parallel for schedule(dynamic, 16)
        for (int i = 0; i < m; ++i) {
            const std::int32_t current = assignment[static_cast<std::size_t>(i)];
            std::int64_t best = std::numeric_limits<std::int64_t>::min(), second = best;
            for (std::int32_t g = 0; g < cluster_count; ++g) {
                const std::int64_t s = profiles.score(y, axis, i, g, current);
                if (s > best) {
                    second = best;
                    best = s;
                } else if (s > second) {
                    second = s;
                }
            }
            order[static_cast<std::size_t>(i)] = {cluster_count > 1 ? best - second : best, i};
        }
        std::sort(order.begin(), order.end(), [](const RowOrder& a, const RowOrder& b) {
            return a.margin != b.margin ? a.margin > b.margin : a.row < b.row;
        });
        std::fill(capacity.begin(), capacity.end(), k);
        for (const RowOrder& ro : order) {
            const int i = ro.row;
            const std::int32_t current = assignment[static_cast<std::size_t>(i)];
            std::int64_t best_score = std::numeric_limits<std::int64_t>::min();
            std::int32_t best_g = -1;
            for (std::int32_t g = 0; g < cluster_count; ++g) {
                if (capacity[static_cast<std::size_t>(g)] <= 0) continue;
                const std::int64_t s = profiles.score(y, axis, i, g, current);
                if (s > best_score || (s == best_score && g == current)) {
                    best_score = s;
                    best_g = g;
                }
            }
            next[static_cast<std::size_t>(i)] = best_g;
            --capacity[static_cast<std::size_t>(best_g)];
        }
        if (next == assignment) break;
        assignment = next;
    }
}

}  // namespace

Partition estimate_partition(const ObservedMatrix& y, int k, Axis axis) {
    const int m = axis == Axis::Rows ? y.n_rows() : y.n_cols();
    if (m < 1) throw domain_error("partition: empty axis");
    if (k < 1 || k > m) throw domain_error("partition: k must lie in [1, axis length]");

    Partition part;
    part.assignment.assign(static_cast<std::size_t>(m), -1);
    if (y.stored_count() == 0) {
        std::fill(part.assignment.begin(), part.assignment.end(), 0);
        part.cluster_count = 1;
        part.degenerate = true;
        return part;
    }

    // k-nearest sets, self forced in.
    std::vector<std::vector<std::int32_t>> nearest(static_cast<std::size_t>(m));
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < m; ++i) {
        const auto sims = axis == Axis::Rows ? core::similarities_to_all(y, i)
                                             : core::col_similarities_to_all(y, i);
        std::vector<std::int32_t> others;
        others.reserve(static_cast<std::size_t>(m) - 1);
        for (std::int32_t j = 0; j < m; ++j)
            if (j != i) others.push_back(j);
        auto ordered = by_similarity(y, axis, i, others, &sims);
        std::vector<std::int32_t> set;
        set.reserve(static_cast<std::size_t>(k));
        set.push_back(i);
        set.insert(set.end(), ordered.begin(), ordered.begin() + (k - 1));
        std::sort(set.begin(), set.end());
        nearest[static_cast<std::size_t>(i)] = std::move(set);
    }

    // Mutual-neighbor graph.
    std::vector<std::vector<std::int32_t>> adj(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        for (std::int32_t j : nearest[static_cast<std::size_t>(i)]) {
            if (j <= i) continue;
            if (std::binary_search(nearest[static_cast<std::size_t>(j)].begin(),
                                   nearest[static_cast<std::size_t>(j)].end(),
                                   static_cast<std::int32_t>(i))) {
                adj[static_cast<std::size_t>(i)].push_back(j);
                adj[static_cast<std::size_t>(j)].push_back(static_cast<std::int32_t>(i));
            }
        }
    }

    std::vector<std::vector<std::int32_t>> groups;
    std::vector<char> visited(static_cast<std::size_t>(m), 0);
    std::vector<std::int32_t> stack;
    for (int start = 0; start < m; ++start) {
        if (visited[static_cast<std::size_t>(start)]) continue;
        std::vector<std::int32_t> comp;
        stack.assign(1, start);
        visited[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            const std::int32_t v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (std::int32_t w : adj[static_cast<std::size_t>(v)]) {
                if (!visited[static_cast<std::size_t>(w)]) {
                    visited[static_cast<std::size_t>(w)] = 1;
                    stack.push_back(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        // Oversized components get peeled into size-k groups; merged cluster
        // pairs come apart here.
        std::vector<std::int32_t> remaining = std::move(comp);
        while (static_cast<int>(remaining.size()) > k) {
            const std::int32_t seed_idx = remaining.front();
            std::vector<std::int32_t> pool(remaining.begin() + 1, remaining.end());
            auto ordered = by_similarity(y, axis, seed_idx, pool, nullptr);
            std::vector<std::int32_t> group;
            group.push_back(seed_idx);
            group.insert(group.end(), ordered.begin(), ordered.begin() + (k - 1));
            std::sort(group.begin(), group.end());
            std::vector<std::int32_t> rest;
            std::set_difference(remaining.begin(), remaining.end(), group.begin(), group.end(),
                                std::back_inserter(rest));
            groups.push_back(std::move(group));
            remaining = std::move(rest);
        }
        groups.push_back(std::move(remaining));
    }

    // Every group has at most k members, so there are at least ceil(m/k) of
    // them; the largest ceil(m/k) become the buckets and everything else is
    // placed during refinement.
    const int target = (m + k - 1) / k;
    std::sort(groups.begin(), groups.end(),
              [](const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
                  return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
              });
    for (int g = 0; g < target; ++g)
        for (std::int32_t v : groups[static_cast<std::size_t>(g)])
            part.assignment[static_cast<std::size_t>(v)] = g;
    refine_balanced(y, axis, part.assignment, target, k);
    part.cluster_count = target;
    return part;
}

core::Recommendation recommend_by_cluster(const ObservedMatrix& y, const Partition& rows,
                                          const Partition& cols, int user,
                                          const std::vector<std::int32_t>& candidates,
                                          std::uint64_t seed) {
    if (static_cast<int>(rows.assignment.size()) != y.n_rows() ||
        static_cast<int>(cols.assignment.size()) != y.n_cols())
        throw domain_error("cluster: partitions must cover the matrix");
    if (user < 0 || user >= y.n_rows()) throw domain_error("cluster: user out of range");
    if (candidates.empty()) throw domain_error("cluster: empty candidate set");

    core::Recommendation rec;
    rec.candidate_count = static_cast<std::int64_t>(candidates.size());

    const std::int32_t a = rows.assignment[static_cast<std::size_t>(user)];
    std::vector<std::int64_t> ones(static_cast<std::size_t>(cols.cluster_count), 0);
    std::vector<std::int64_t> zeros(static_cast<std::size_t>(cols.cluster_count), 0);
    for (std::int32_t v = 0; v < y.n_rows(); ++v) {
        if (rows.assignment[static_cast<std::size_t>(v)] != a) continue;
        rec.neighbors.push_back(v);
        for (const Cell& cell : y.row(v)) {
            const auto b = static_cast<std::size_t>(cols.assignment[static_cast<std::size_t>(cell.index)]);
            if (cell.bit) {
                ++ones[b];
            } else {
                ++zeros[b];
            }
        }
    }

    std::vector<std::vector<std::int32_t>> cand_in(static_cast<std::size_t>(cols.cluster_count));
    for (std::int32_t c : candidates) {
        if (c < 0 || c >= y.n_cols()) throw domain_error("cluster: candidate out of range");
        cand_in[static_cast<std::size_t>(cols.assignment[static_cast<std::size_t>(c)])].push_back(c);
    }
    std::vector<std::size_t> eligible;
    for (std::size_t b = 0; b < cand_in.size(); ++b)
        if (!cand_in[b].empty()) eligible.push_back(b);

    Rng tie_rng(derive_seed(seed, stream::kVoteTies));
    Rng pick_rng(derive_seed(seed, stream::kClusterPick));
    if (eligible.empty()) {
        rec.item = candidates[static_cast<std::size_t>(pick_rng.below(candidates.size()))];
        return rec;
    }
    std::int64_t best = ones[eligible.front()];
    for (std::size_t b : eligible) best = std::max(best, ones[b]);
    std::vector<std::size_t> argmax;
    for (std::size_t b : eligible)
        if (ones[b] == best) argmax.push_back(b);
    const std::size_t chosen = argmax[static_cast<std::size_t>(tie_rng.below(argmax.size()))];
    const auto& pool = cand_in[chosen];
    rec.item = pool[static_cast<std::size_t>(pick_rng.below(pool.size()))];
    rec.vote_ones = ones[chosen];
    rec.vote_zeros = zeros[chosen];
    return rec;
}

Partition true_partition(const model::LatentModel& latent, Axis axis) {
    Partition part;
    const int m = axis == Axis::Rows ? latent.n_rows : latent.n_cols;
    part.assignment.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) part.assignment[static_cast<std::size_t>(i)] = i / latent.k;
    part.cluster_count = axis == Axis::Rows ? latent.row_clusters : latent.col_clusters;
    return part;
}

core::Recommendation oracle_recommend(const model::LatentModel& latent, const ObservedMatrix& y,
                                      int user, const std::vector<std::int32_t>& candidates,
                                      std::uint64_t seed) {
    if (latent.n_rows != y.n_rows() || latent.n_cols != y.n_cols())
        throw domain_error("cluster: latent and observed shapes differ");
    return recommend_by_cluster(y, true_partition(latent, Axis::Rows),
                                true_partition(latent, Axis::Columns), user, candidates, seed);
}

}  // namespace paf::cluster

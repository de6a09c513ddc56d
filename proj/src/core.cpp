#include "paf/core.hpp"

#include <algorithm>
#include <numeric>

#include "paf/rng.hpp"

namespace paf::core {

using model::Cell;
using model::ObservedMatrix;

std::int64_t similarity(const ObservedMatrix& y, int i, int j) {
    if (i < 0 || i >= y.n_rows() || j < 0 || j >= y.n_rows())
        throw domain_error("similarity: row index out of range");
    auto a = y.row(i);
    auto b = y.row(j);
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

std::vector<std::int64_t> similarities_to_all(const ObservedMatrix& y, int row) {
    if (row < 0 || row >= y.n_rows()) throw domain_error("similarity: row index out of range");
    std::vector<std::int64_t> out(static_cast<std::size_t>(y.n_rows()), 0);
    for (const Cell& c : y.row(row))
        for (const Cell& rc : y.col(c.index))
            if (rc.bit == c.bit) ++out[static_cast<std::size_t>(rc.index)];
    return out;
}

std::vector<std::int64_t> col_similarities_to_all(const ObservedMatrix& y, int col) {
    if (col < 0 || col >= y.n_cols()) throw domain_error("similarity: column index out of range");
    std::vector<std::int64_t> out(static_cast<std::size_t>(y.n_cols()), 0);
    for (const Cell& c : y.col(col))
        for (const Cell& rc : y.row(c.index))
            if (rc.bit == c.bit) ++out[static_cast<std::size_t>(rc.index)];
    return out;
}

std::vector<std::int32_t> top_neighbors(const ObservedMatrix& y, int user, int T,
                                        std::uint64_t seed) {
    const int m = y.n_rows();
    if (user < 0 || user >= m) throw domain_error("top_neighbors: user out of range");
    if (T < 1 || T > m) throw domain_error("top_neighbors: T must lie in [1, n_rows]");

    const auto sims = similarities_to_all(y, user);
    std::vector<std::int32_t> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::int32_t a, std::int32_t b) {
        return sims[static_cast<std::size_t>(a)] != sims[static_cast<std::size_t>(b)]
                   ? sims[static_cast<std::size_t>(a)] > sims[static_cast<std::size_t>(b)]
                   : a < b;
    });
    if (T == m) return idx;

    const std::int64_t cutoff = sims[static_cast<std::size_t>(idx[static_cast<std::size_t>(T - 1)])];
    std::vector<std::int32_t> selected;
    selected.reserve(static_cast<std::size_t>(T));
    std::vector<std::int32_t> tied;
    for (std::int32_t i : idx) {
        const std::int64_t s = sims[static_cast<std::size_t>(i)];
        if (s > cutoff) {
            selected.push_back(i);
        } else if (s == cutoff) {
            tied.push_back(i);
        } else {
            break;
        }
    }
    auto need = static_cast<std::size_t>(T) - selected.size();
    // The queried row is never displaced by rows tied with it.
    auto self = std::find(tied.begin(), tied.end(), static_cast<std::int32_t>(user));
    if (self != tied.end() && need > 0) {
        selected.push_back(user);
        tied.erase(self);
        --need;
    }
    Rng rng(derive_seed(seed, stream::kNeighborTies));
    rng.shuffle(tied);
    selected.insert(selected.end(), tied.begin(), tied.begin() + static_cast<std::ptrdiff_t>(need));
    return selected;
}

std::vector<std::int32_t> erased_columns(const ObservedMatrix& y, int row) {
    if (row < 0 || row >= y.n_rows()) throw domain_error("erased_columns: row out of range");
    std::vector<std::int32_t> out;
    auto stored = y.row(row);
    std::size_t s = 0;
    for (std::int32_t c = 0; c < y.n_cols(); ++c) {
        if (s < stored.size() && stored[s].index == c) {
            ++s;
        } else {
            out.push_back(c);
        }
    }
    return out;
}

Recommendation recommend(const ObservedMatrix& y, int user, int T,
                         const std::vector<std::int32_t>* candidates, std::uint64_t seed) {
    std::vector<std::int32_t> cands = candidates ? *candidates : erased_columns(y, user);
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    if (cands.empty()) throw domain_error("recommend: empty candidate set");
    if (cands.front() < 0 || cands.back() >= y.n_cols())
        throw domain_error("recommend: candidate column out of range");

    Recommendation rec;
    rec.candidate_count = static_cast<std::int64_t>(cands.size());
    rec.neighbors = top_neighbors(y, user, T, seed);

    std::vector<std::int32_t> slot(static_cast<std::size_t>(y.n_cols()), -1);
    for (std::size_t s = 0; s < cands.size(); ++s) slot[static_cast<std::size_t>(cands[s])] = static_cast<std::int32_t>(s);
    std::vector<std::int64_t> ones(cands.size(), 0);
    std::vector<std::int64_t> zeros(cands.size(), 0);
    for (std::int32_t v : rec.neighbors) {
        for (const Cell& cell : y.row(v)) {
            const std::int32_t s = slot[static_cast<std::size_t>(cell.index)];
            if (s < 0) continue;
            if (cell.bit) {
                ++ones[static_cast<std::size_t>(s)];
            } else {
                ++zeros[static_cast<std::size_t>(s)];
            }
        }
    }

    const std::int64_t best = *std::max_element(ones.begin(), ones.end());
    std::vector<std::size_t> argmax;
    for (std::size_t s = 0; s < cands.size(); ++s)
        if (ones[s] == best) argmax.push_back(s);
    Rng rng(derive_seed(seed, stream::kVoteTies));
    const std::size_t pick = argmax[static_cast<std::size_t>(rng.below(argmax.size()))];
    rec.item = cands[pick];
    rec.vote_ones = ones[pick];
    rec.vote_zeros = zeros[pick];
    return rec;
}

int predict_entry(const ObservedMatrix& y, int user, int item, int T, std::uint64_t seed,
                  int tie_fallback) {
    if (item < 0 || item >= y.n_cols()) throw domain_error("predict_entry: item out of range");
    const auto neighbors = top_neighbors(y, user, T, seed);
    std::int64_t ones = 0, zeros = 0;
    for (std::int32_t v : neighbors) {
        switch (y.at(v, item)) {
            case model::Ternary::One: ++ones; break;
            case model::Ternary::Zero: ++zeros; break;
            case model::Ternary::Erased: break;
        }
    }
    if (ones > zeros) return 1;
    if (zeros > ones) return 0;
    return tie_fallback;
}

Recommendation recommend_global(const ObservedMatrix& y, int user, std::uint64_t seed) {
    return recommend(y, user, y.n_rows(), nullptr, seed);
}

}  // namespace paf::core

#include "paf/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "paf/rng.hpp"

namespace paf::model {

void ModelParams::validate() const {
    if (n < 1) throw domain_error("model: n must be >= 1");
    if (rows < 0) throw domain_error("model: rows must be >= 0");
    if (k < 1) throw domain_error("model: k must be >= 1");
    if (n % k != 0) throw domain_error("model: k must divide n");
    if (row_count() % k != 0) throw domain_error("model: k must divide the row count");
    if (p < 0.0 || p >= 0.5) throw domain_error("model: p must lie in [0, 1/2)");
    if (c <= 0.0) throw domain_error("model: c must be > 0");
    if (alpha < 0.0) throw domain_error("model: alpha must be >= 0");
    if (c / std::pow(static_cast<double>(n), alpha) > 1.0)
        throw domain_error("model: c/n^alpha exceeds 1, erasure probability would be negative");
}

double erasure_prob(const ModelParams& params) {
    params.validate();
    const double keep = params.c / std::pow(static_cast<double>(params.n), params.alpha);
    return 1.0 - keep;
}

LatentModel generate_latent(const ModelParams& params, std::uint64_t seed) {
    params.validate();
    LatentModel latent;
    latent.n_rows = params.row_count();
    latent.n_cols = params.col_count();
    latent.k = params.k;
    latent.row_clusters = params.row_cluster_count();
    latent.col_clusters = params.col_cluster_count();
    latent.cluster_values.resize(static_cast<std::size_t>(latent.row_clusters) * latent.col_clusters);
    Rng rng(derive_seed(seed, stream::kLatent));
    for (auto& v : latent.cluster_values) v = static_cast<std::uint8_t>(rng.next() & 1u);
    return latent;
}

ObservedMatrix::ObservedMatrix(int n_rows, int n_cols, std::vector<Entry> entries)
    : n_rows_(n_rows), n_cols_(n_cols) {
    if (n_rows < 0 || n_cols < 0) throw domain_error("matrix: negative dimensions");
    rows_.resize(static_cast<std::size_t>(n_rows));
    cols_.resize(static_cast<std::size_t>(n_cols));
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    const Entry* prev = nullptr;
    for (const Entry& e : entries) {
        if (e.row < 0 || e.row >= n_rows || e.col < 0 || e.col >= n_cols)
            throw domain_error("matrix: entry out of range");
        if (e.bit > 1) throw domain_error("matrix: stored values must be 0 or 1");
        if (prev && prev->row == e.row && prev->col == e.col)
            throw domain_error("matrix: duplicate entry");
        rows_[static_cast<std::size_t>(e.row)].push_back({e.col, e.bit});
        cols_[static_cast<std::size_t>(e.col)].push_back({e.row, e.bit});
        prev = &e;
    }
    stored_ = static_cast<std::int64_t>(entries.size());
}

Ternary ObservedMatrix::at(int row, int col) const {
    if (row < 0 || row >= n_rows_ || col < 0 || col >= n_cols_)
        throw domain_error("matrix: index out of range");
    const auto& r = rows_[static_cast<std::size_t>(row)];
    auto it = std::lower_bound(r.begin(), r.end(), col,
                               [](const Cell& cell, int c) { return cell.index < c; });
    if (it == r.end() || it->index != col) return Ternary::Erased;
    return it->bit ? Ternary::One : Ternary::Zero;
}

std::string ObservedMatrix::to_text() const {
    std::ostringstream out;
    out << n_rows_ << ' ' << n_cols_ << '\n';
    for (std::size_t r = 0; r < rows_.size(); ++r)
        for (const Cell& cell : rows_[r])
            out << r << ' ' << cell.index << ' ' << static_cast<int>(cell.bit) << '\n';
    return out.str();
}

ObservedMatrix ObservedMatrix::from_text(std::istream& in) {
    int n_rows = 0, n_cols = 0;
    if (!(in >> n_rows >> n_cols)) throw domain_error("matrix: missing header");
    std::vector<Entry> entries;
    std::int64_t row, col;
    int bit;
    while (in >> row >> col >> bit) {
        if (bit != 0 && bit != 1) throw domain_error("matrix: stored values must be 0 or 1");
        entries.push_back({static_cast<std::int32_t>(row), static_cast<std::int32_t>(col),
                           static_cast<std::uint8_t>(bit)});
    }
    if (!in.eof() && in.fail()) throw domain_error("matrix: malformed entry line");
    return ObservedMatrix(n_rows, n_cols, std::move(entries));
}

ObservedMatrix ObservedMatrix::from_text(const std::string& text) {
    std::istringstream in(text);
    return from_text(in);
}

ObservedMatrix apply_channels(const LatentModel& latent, const ModelParams& params,
                              std::uint64_t seed) {
    const double eps = erasure_prob(params);
    const double keep = 1.0 - eps;
    Rng erase_rng(derive_seed(seed, stream::kErasure));
    Rng flip_rng(derive_seed(seed, stream::kBscFlip));

    std::vector<ObservedMatrix::Entry> entries;
    entries.reserve(static_cast<std::size_t>(
        keep * static_cast<double>(latent.n_rows) * latent.n_cols * 1.1) + 16);

    std::vector<std::int32_t> kept;
    for (int u = 0; u < latent.n_rows; ++u) {
        kept.clear();
        if (keep >= 0.25) {
            for (int v = 0; v < latent.n_cols; ++v)
                if (erase_rng.bernoulli(keep)) kept.push_back(v);
        } else {
            // Sparse regime: draw the per-row count, then the positions.
            const auto cnt = static_cast<std::int32_t>(erase_rng.binomial(latent.n_cols, keep));
            kept = erase_rng.sample_without_replacement(latent.n_cols, cnt);
        }
        for (std::int32_t v : kept) {
            std::uint8_t bit = latent.value(u, v);
            if (params.p > 0.0 && flip_rng.bernoulli(params.p)) bit ^= 1u;
            entries.push_back({u, v, bit});
        }
    }
    return ObservedMatrix(latent.n_rows, latent.n_cols, std::move(entries));
}

}  // namespace paf::model

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace paf {

// Thrown on violated parameter invariants; the CLI maps it to exit code 2.
class domain_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace paf

namespace paf::model {

// Generative parameters for the block-constant rating model.
// The erasure probability is 1 - c / n^alpha.
struct ModelParams {
    int n = 0;          // items (columns); also users unless `rows` is set
    int k = 1;          // cluster side length; must divide both dimensions
    double p = 0.0;     // bit-flip probability, in [0, 1/2)
    double c = 1.0;     // erasure scale, > 0
    double alpha = 0.0; // erasure exponent, >= 0
    int rows = 0;       // optional row count for rectangular matrices (0 = square)

    int row_count() const noexcept { return rows > 0 ? rows : n; }
    int col_count() const noexcept { return n; }
    int row_cluster_count() const noexcept { return row_count() / k; }
    int col_cluster_count() const noexcept { return col_count() / k; }

    void validate() const;  // throws domain_error naming the violated constraint
};

double erasure_prob(const ModelParams& params);

// Hidden ground truth: one fair-coin bit per (row cluster, column cluster)
// block. Partitions are contiguous index blocks of size k.
struct LatentModel {
    int n_rows = 0;
    int n_cols = 0;
    int k = 1;
    int row_clusters = 0;
    int col_clusters = 0;
    std::vector<std::uint8_t> cluster_values;  // row_clusters x col_clusters, row-major

    int row_cluster(int u) const noexcept { return u / k; }
    int col_cluster(int v) const noexcept { return v / k; }
    std::uint8_t cluster_value(int i, int j) const noexcept {
        return cluster_values[static_cast<std::size_t>(i) * col_clusters + j];
    }
    std::uint8_t value(int u, int v) const noexcept {
        return cluster_value(row_cluster(u), col_cluster(v));
    }
};

LatentModel generate_latent(const ModelParams& params, std::uint64_t seed);

enum class Ternary : std::uint8_t { Zero = 0, One = 1, Erased = 2 };

struct Cell {
    std::int32_t index;  // column index in a row list, row index in a column list
    std::uint8_t bit;
};

// Sparse user-item matrix over {0, 1, erased}; absence of a stored entry means
// erased. Immutable after construction and safe to share across threads.
// Keeps both row-major and column-major adjacency, sorted by index.
class ObservedMatrix {
public:
    struct Entry {
        std::int32_t row;
        std::int32_t col;
        std::uint8_t bit;
    };

    ObservedMatrix(int n_rows, int n_cols, std::vector<Entry> entries);

    int n_rows() const noexcept { return n_rows_; }
    int n_cols() const noexcept { return n_cols_; }
    std::int64_t stored_count() const noexcept { return stored_; }

    Ternary at(int row, int col) const;

    std::span<const Cell> row(int r) const { return rows_[static_cast<std::size_t>(r)]; }
    std::span<const Cell> col(int c) const { return cols_[static_cast<std::size_t>(c)]; }

    // Text format: header "n_rows n_cols", then one "row col bit" line per
    // stored entry (0-indexed, row-major order). Missing pairs are erased.
    std::string to_text() const;
    static ObservedMatrix from_text(std::istream& in);
    static ObservedMatrix from_text(const std::string& text);

private:
    int n_rows_ = 0;
    int n_cols_ = 0;
    std::int64_t stored_ = 0;
    std::vector<std::vector<Cell>> rows_;
    std::vector<std::vector<Cell>> cols_;
};

// Pushes the latent matrix through the bit-flip channel and then the erasure
// channel. Flips, erasures, and cluster values come from independently
// derived streams, so changing p leaves the erasure pattern intact.
ObservedMatrix apply_channels(const LatentModel& latent, const ModelParams& params,
                              std::uint64_t seed);

}  // namespace paf::model

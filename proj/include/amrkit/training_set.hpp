#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "amrkit/feature_matrix.hpp"

namespace amrkit {

// A set of labeled matrix rows ("samples") prepared for split search. Besides
// the row-major matrix it keeps a column-major copy restricted to the samples,
// with each column's entries ordered by (value, sample).
class TrainingSet {
public:
    struct Entry {
        std::uint32_t sample;
        std::uint32_t value;
    };

    // Throws NoLabeledSamples if `rows` is empty or names an unlabeled row,
    // IndexOutOfRange for a row beyond the matrix.
    TrainingSet(const FeatureMatrix& matrix, std::vector<std::size_t> rows);

    // All labeled rows.
    explicit TrainingSet(const FeatureMatrix& matrix);

    const FeatureMatrix& matrix() const { return *matrix_; }
    std::size_t n_samples() const { return rows_.size(); }
    std::size_t n_features() const { return matrix_->n_features(); }
    std::size_t n_res() const { return n_res_; }
    std::size_t n_sus() const { return rows_.size() - n_res_; }

    std::span<const std::size_t> rows() const { return rows_; }
    const SparseRow& row(std::size_t sample) const { return matrix_->rows[rows_[sample]]; }
    bool is_res(std::size_t sample) const { return is_res_[sample] != 0; }
    std::span<const std::uint8_t> res_flags() const { return is_res_; }

    std::span<const Entry> column(std::uint32_t feature) const {
        return {entries_.data() + offsets_[feature], entries_.data() + offsets_[feature + 1]};
    }

private:
    const FeatureMatrix* matrix_;
    std::vector<std::size_t> rows_;
    std::vector<std::uint8_t> is_res_;
    std::size_t n_res_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<Entry> entries_;
};

}  // namespace amrkit

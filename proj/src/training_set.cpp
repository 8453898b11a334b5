#include "amrkit/training_set.hpp"

#include <algorithm>

#include "amrkit/error.hpp"

namespace amrkit {

TrainingSet::TrainingSet(const FeatureMatrix& matrix) : TrainingSet(matrix, matrix.labeled_rows()) {}

TrainingSet::TrainingSet(const FeatureMatrix& matrix, std::vector<std::size_t> rows)
    : matrix_(&matrix), rows_(std::move(rows)) {
    if (rows_.empty()) fail(ErrorCode::NoLabeledSamples, "no labeled samples to train on");
    is_res_.resize(rows_.size());
    for (std::size_t s = 0; s < rows_.size(); ++s) {
        if (rows_[s] >= matrix.n_rows())
            fail(ErrorCode::IndexOutOfRange, "row " + std::to_string(rows_[s]) + " beyond matrix");
        const auto& label = matrix.labels[rows_[s]];
        if (!label)
            fail(ErrorCode::NoLabeledSamples, "row '" + matrix.row_ids[rows_[s]] + "' is unlabeled");
        is_res_[s] = *label == Phenotype::RES ? 1 : 0;
        n_res_ += is_res_[s];
    }

    const std::size_t p = matrix.n_features();
    offsets_.assign(p + 1, 0);
    for (std::size_t s = 0; s < rows_.size(); ++s)
        for (std::uint32_t f : row(s).indices) {
            if (f >= p) fail(ErrorCode::IndexOutOfRange, "column index beyond vocabulary");
            ++offsets_[f + 1];
        }
    for (std::size_t f = 0; f < p; ++f) offsets_[f + 1] += offsets_[f];

    entries_.resize(offsets_[p]);
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t s = 0; s < rows_.size(); ++s) {
        const SparseRow& r = row(s);
        for (std::size_t j = 0; j < r.nnz(); ++j)
            entries_[cursor[r.indices[j]]++] = Entry{static_cast<std::uint32_t>(s), r.values[j]};
    }
    // Entries are already in sample order; a stable sort by value gives (value, sample).
    for (std::size_t f = 0; f < p; ++f) {
        auto first = entries_.begin() + static_cast<std::ptrdiff_t>(offsets_[f]);
        auto last = entries_.begin() + static_cast<std::ptrdiff_t>(offsets_[f + 1]);
        if (last - first > 1)
            std::stable_sort(first, last, [](const Entry& a, const Entry& b) { return a.value < b.value; });
    }
}

}  // namespace amrkit

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "amrkit/kmer.hpp"
#include "amrkit/sequence_io.hpp"

namespace amrkit {

// Column indices strictly ascending, stored values > 0.
struct SparseRow {
    std::vector<std::uint32_t> indices;
    std::vector<std::uint32_t> values;

    std::size_t nnz() const { return indices.size(); }
    std::uint32_t value_at(std::uint32_t column) const;

    bool operator==(const SparseRow&) const = default;
};

struct FeatureMatrix {
    KmerVocabulary vocabulary;
    std::vector<std::string> row_ids;
    std::vector<SparseRow> rows;
    std::vector<std::optional<Phenotype>> labels;  // one entry per row
    bool binarized = false;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_features() const { return vocabulary.size(); }

    // Rows that carry a label, ascending.
    std::vector<std::size_t> labeled_rows() const;

    // Throws CorruptMatrixFile on any broken structural invariant.
    void validate() const;

    bool operator==(const FeatureMatrix&) const = default;
};

// Counts every isolate, builds the union vocabulary (ascending code order) and
// projects each isolate onto it. Row order follows the dataset.
FeatureMatrix build_matrix(const Dataset& dataset, const KmerSpec& spec, unsigned threads = 1);

// Projects onto a fixed vocabulary; k-mers outside it are dropped. Used to put
// two corpora into the same feature space.
FeatureMatrix build_matrix(const Dataset& dataset, const KmerVocabulary& vocabulary, unsigned threads = 1);

FeatureMatrix binarize(FeatureMatrix matrix);

// Layout (all integers little-endian):
//   "KMAT1", vocabulary block (see save_vocabulary), flags (u8, bit 0 =
//   binarized), row count (u64), then per row: id length (u32) + UTF-8 bytes,
//   label (u8: 0=SUS, 1=RES, 255=none), nnz (u64), nnz x (index u32, count u32).
void save_matrix(const FeatureMatrix& matrix, const std::filesystem::path& path);
FeatureMatrix load_matrix(const std::filesystem::path& path);

std::string serialize_matrix(const FeatureMatrix& matrix);
FeatureMatrix deserialize_matrix(std::string_view bytes);

}  // namespace amrkit

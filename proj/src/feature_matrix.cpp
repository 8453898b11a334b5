#include "amrkit/feature_matrix.hpp"

#include <algorithm>
#include <limits>

#include "amrkit/error.hpp"
#include "amrkit/parallel.hpp"
#include "serialization.hpp"

namespace amrkit {

std::uint32_t SparseRow::value_at(std::uint32_t column) const {
    auto it = std::lower_bound(indices.begin(), indices.end(), column);
    if (it == indices.end() || *it != column) return 0;
    return values[static_cast<std::size_t>(it - indices.begin())];
}

std::vector<std::size_t> FeatureMatrix::labeled_rows() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i]) out.push_back(i);
    return out;
}

void FeatureMatrix::validate() const {
    auto bad = [](const std::string& what) { fail(ErrorCode::CorruptMatrixFile, what); };
    if (row_ids.size() != rows.size() || labels.size() != rows.size())
        bad("row id / label / row counts disagree");
    const std::size_t cols = vocabulary.size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const SparseRow& row = rows[r];
        if (row.indices.size() != row.values.size()) bad("row " + std::to_string(r) + ": ragged storage");
        for (std::size_t j = 0; j < row.indices.size(); ++j) {
            if (row.indices[j] >= cols) bad("row " + std::to_string(r) + ": column index out of range");
            if (j > 0 && row.indices[j] <= row.indices[j - 1])
                bad("row " + std::to_string(r) + ": column indices not strictly ascending");
            if (row.values[j] == 0) bad("row " + std::to_string(r) + ": stored zero");
            if (binarized && row.values[j] != 1) bad("row " + std::to_string(r) + ": non-binary value");
        }
    }
}

namespace {

SparseRow project(const KmerCounts& counts, const KmerVocabulary& vocab, const std::string& id) {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> cells;
    cells.reserve(counts.table.size());
    for (const auto& [code, n] : counts.table) {
        if (auto col = vocab.column_of(code)) cells.emplace_back(*col, n);
    }
    std::sort(cells.begin(), cells.end());
    SparseRow row;
    row.indices.reserve(cells.size());
    row.values.reserve(cells.size());
    for (const auto& [col, n] : cells) {
        if (n > std::numeric_limits<std::uint32_t>::max())
            fail(ErrorCode::CountOverflow, "isolate '" + id + "': k-mer count exceeds 32 bits");
        row.indices.push_back(col);
        row.values.push_back(static_cast<std::uint32_t>(n));
    }
    return row;
}

FeatureMatrix assemble(const Dataset& dataset, KmerVocabulary vocab,
                       const std::vector<KmerCounts>& counts, unsigned threads) {
    if (vocab.size() > std::numeric_limits<std::uint32_t>::max())
        fail(ErrorCode::CountOverflow, "vocabulary exceeds 32-bit column indices");
    FeatureMatrix m;
    m.vocabulary = std::move(vocab);
    const std::size_t n = dataset.isolates.size();
    m.row_ids.resize(n);
    m.labels.resize(n);
    m.rows.resize(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const Isolate& iso = dataset.isolates[i];
        m.row_ids[i] = iso.isolate_id;
        m.labels[i] = iso.label;
        m.rows[i] = project(counts[i], m.vocabulary, iso.isolate_id);
    });
    return m;
}

std::vector<KmerCounts> count_all(const Dataset& dataset, const KmerSpec& spec, unsigned threads) {
    if (dataset.isolates.empty()) fail(ErrorCode::EmptyDataset, "dataset has no isolates");
    spec.validate();
    std::vector<KmerCounts> counts(dataset.isolates.size());
    parallel_for(counts.size(), threads,
                 [&](std::size_t i) { counts[i] = count_kmers(dataset.isolates[i], spec); });
    return counts;
}

}  // namespace

FeatureMatrix build_matrix(const Dataset& dataset, const KmerSpec& spec, unsigned threads) {
    std::vector<KmerCounts> counts = count_all(dataset, spec, threads);
    KmerVocabulary vocab = build_vocabulary(counts);
    return assemble(dataset, std::move(vocab), counts, threads);
}

FeatureMatrix build_matrix(const Dataset& dataset, const KmerVocabulary& vocabulary, unsigned threads) {
    std::vector<KmerCounts> counts = count_all(dataset, vocabulary.spec(), threads);
    return assemble(dataset, vocabulary, counts, threads);
}

FeatureMatrix binarize(FeatureMatrix matrix) {
    for (auto& row : matrix.rows) std::fill(row.values.begin(), row.values.end(), 1u);
    matrix.binarized = true;
    return matrix;
}

std::string serialize_matrix(const FeatureMatrix& m) {
    detail::ByteWriter out;
    out.raw("KMAT1");
    detail::write_vocabulary_block(out, m.vocabulary);
    out.u8(m.binarized ? 1 : 0);
    out.u64(m.rows.size());
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        out.str(m.row_ids[r]);
        out.u8(m.labels[r] ? static_cast<std::uint8_t>(*m.labels[r]) : 255);
        const SparseRow& row = m.rows[r];
        out.u64(row.nnz());
        for (std::size_t j = 0; j < row.nnz(); ++j) {
            out.u32(row.indices[j]);
            out.u32(row.values[j]);
        }
    }
    return out.bytes();
}

FeatureMatrix deserialize_matrix(std::string_view bytes) {
    detail::ByteReader in(bytes, ErrorCode::CorruptMatrixFile);
    in.expect_magic("KMAT1");
    FeatureMatrix m;
    m.vocabulary = detail::read_vocabulary_block(in);
    std::uint8_t flags = in.u8();
    if (flags > 1) in.corrupt("unknown matrix flags");
    m.binarized = (flags & 1) != 0;
    std::uint64_t n_rows = in.u64();
    in.check_count(n_rows, 4 + 1 + 8);
    m.row_ids.reserve(n_rows);
    m.rows.reserve(n_rows);
    m.labels.reserve(n_rows);
    for (std::uint64_t r = 0; r < n_rows; ++r) {
        m.row_ids.push_back(in.str());
        std::uint8_t label = in.u8();
        if (label == 0) m.labels.emplace_back(Phenotype::SUS);
        else if (label == 1) m.labels.emplace_back(Phenotype::RES);
        else if (label == 255) m.labels.emplace_back(std::nullopt);
        else in.corrupt("invalid label byte " + std::to_string(label));
        std::uint64_t nnz = in.u64();
        in.check_count(nnz, 8);
        SparseRow row;
        row.indices.resize(nnz);
        row.values.resize(nnz);
        for (std::uint64_t j = 0; j < nnz; ++j) {
            row.indices[j] = in.u32();
            row.values[j] = in.u32();
        }
        m.rows.push_back(std::move(row));
    }
    in.expect_end();
    m.validate();
    return m;
}

void save_matrix(const FeatureMatrix& matrix, const std::filesystem::path& path) {
    detail::write_file(path, serialize_matrix(matrix));
}

FeatureMatrix load_matrix(const std::filesystem::path& path) {
    return deserialize_matrix(detail::read_file(path));
}

}  // namespace amrkit

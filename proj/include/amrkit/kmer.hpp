#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "amrkit/sequence_io.hpp"

namespace amrkit {

inline constexpr int kMaxK = 32;

struct KmerSpec {
    int k = 10;
    bool canonical = true;

    // Throws InvalidK (k < 1) or KTooLarge (k > 32).
    void validate() const;

    bool operator==(const KmerSpec&) const = default;
};

// 2 bits per base (A=0, C=1, G=2, T=3), leftmost base in the most significant
// occupied pair. Bits above 2k are zero.
using KmerCode = std::uint64_t;

// Returns 0..3 for A/C/G/T (either case), -1 for anything else.
inline int base_code(char c) {
    switch (c) {
        case 'A': case 'a': return 0;
        case 'C': case 'c': return 1;
        case 'G': case 'g': return 2;
        case 'T': case 't': return 3;
        default: return -1;
    }
}

inline constexpr KmerCode kmer_mask(int k) {
    return k >= 32 ? ~KmerCode{0} : (KmerCode{1} << (2 * k)) - 1;
}

KmerCode encode_kmer(std::string_view bases);
std::string decode_kmer(KmerCode code, int k);

KmerCode reverse_complement(KmerCode code, int k);

inline KmerCode canonical(KmerCode code, int k) {
    KmerCode rc = reverse_complement(code, k);
    return rc < code ? rc : code;
}

struct KmerCounts {
    KmerSpec spec;
    std::unordered_map<KmerCode, std::uint64_t> table;

    std::uint64_t total() const;
};

// Slides a length-k window over `bases`, skipping windows that contain any
// non-ACGT letter, and adds each window's code to `counts`.
void add_kmers(std::string_view bases, const KmerSpec& spec, KmerCounts& counts);

// Windows never span contigs.
KmerCounts count_kmers(const Isolate& isolate, const KmerSpec& spec);

// (G + C) / (A + C + G + T) from k=1 literal-strand counts. Throws NoValidBases.
double gc_content(const Isolate& isolate);

// occurrence count -> number of distinct k-mers seen that many times
using KmerHistogram = std::map<std::uint64_t, std::uint64_t>;

KmerHistogram histogram(const KmerCounts& counts);

// Two columns: occurrence_count, num_kmers; ascending.
void write_histogram_tsv(std::ostream& out, const KmerHistogram& hist);

class KmerVocabulary {
public:
    KmerVocabulary() = default;
    // `codes` must be strictly ascending.
    KmerVocabulary(KmerSpec spec, std::vector<KmerCode> codes);

    const KmerSpec& spec() const { return spec_; }
    const std::vector<KmerCode>& codes() const { return codes_; }
    std::size_t size() const { return codes_.size(); }

    // Column position of `code`, if present.
    std::optional<std::uint32_t> column_of(KmerCode code) const;

    bool operator==(const KmerVocabulary&) const = default;

private:
    KmerSpec spec_;
    std::vector<KmerCode> codes_;
};

// Sorted union of all keys. Throws MixedSpecs, EmptyDataset (no inputs).
KmerVocabulary build_vocabulary(std::span<const KmerCounts> counts_per_isolate);

// Binary layout: "KVOC1", k (u8), canonical (u8), N (u64 LE), N codes (u64 LE).
void save_vocabulary(const KmerVocabulary& vocab, const std::filesystem::path& path);
KmerVocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace amrkit

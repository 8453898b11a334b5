#include "amrkit/kmer.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "amrkit/error.hpp"
#include "serialization.hpp"

namespace amrkit {

void KmerSpec::validate() const {
    if (k < 1) fail(ErrorCode::InvalidK, "k must be at least 1, got " + std::to_string(k));
    if (k > kMaxK)
        fail(ErrorCode::KTooLarge, "k must be at most 32, got " + std::to_string(k));
}

KmerCode encode_kmer(std::string_view bases) {
    if (bases.empty()) fail(ErrorCode::InvalidK, "empty k-mer");
    if (bases.size() > static_cast<std::size_t>(kMaxK))
        fail(ErrorCode::KTooLarge, "k-mer longer than 32 bases");
    KmerCode code = 0;
    for (std::size_t i = 0; i < bases.size(); ++i) {
        int b = base_code(bases[i]);
        if (b < 0)
            fail(ErrorCode::AmbiguousBase,
                 "non-ACGT base '" + std::string(1, bases[i]) + "' at position " + std::to_string(i));
        code = (code << 2) | static_cast<KmerCode>(b);
    }
    return code;
}

std::string decode_kmer(KmerCode code, int k) {
    static constexpr char kLetters[4] = {'A', 'C', 'G', 'T'};
    std::string out(static_cast<std::size_t>(k), 'A');
    for (int i = k - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kLetters[code & 3];
        code >>= 2;
    }
    return out;
}

KmerCode reverse_complement(KmerCode code, int k) {
    KmerCode x = ~code;
    x = ((x >> 2) & 0x3333333333333333ULL) | ((x & 0x3333333333333333ULL) << 2);
    x = ((x >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((x & 0x0F0F0F0F0F0F0F0FULL) << 4);
    x = __builtin_bswap64(x);
    return x >> (64 - 2 * k);
}

std::uint64_t KmerCounts::total() const {
    std::uint64_t sum = 0;
    for (const auto& [code, n] : table) sum += n;
    return sum;
}

void add_kmers(std::string_view bases, const KmerSpec& spec, KmerCounts& counts) {
    const int k = spec.k;
    const KmerCode mask = kmer_mask(k);
    KmerCode code = 0;
    int run = 0;  // consecutive ACGT bases ending at the current position
    for (char c : bases) {
        int b = base_code(c);
        if (b < 0) {
            run = 0;
            code = 0;
            continue;
        }
        code = ((code << 2) | static_cast<KmerCode>(b)) & mask;
        if (++run >= k) {
            ++counts.table[spec.canonical ? canonical(code, k) : code];
        }
    }
}

KmerCounts count_kmers(const Isolate& isolate, const KmerSpec& spec) {
    spec.validate();
    KmerCounts counts{spec, {}};
    std::size_t windows = 0;
    for (const auto& c : isolate.contigs)
        if (c.bases.size() >= static_cast<std::size_t>(spec.k)) windows += c.bases.size() - spec.k + 1;
    counts.table.reserve(windows);
    for (const auto& c : isolate.contigs) add_kmers(c.bases, spec, counts);
    return counts;
}

double gc_content(const Isolate& isolate) {
    KmerCounts counts = count_kmers(isolate, KmerSpec{1, false});
    auto get = [&](char base) -> std::uint64_t {
        auto it = counts.table.find(encode_kmer(std::string_view(&base, 1)));
        return it == counts.table.end() ? 0 : it->second;
    };
    const std::uint64_t gc = get('G') + get('C');
    const std::uint64_t total = gc + get('A') + get('T');
    if (total == 0)
        fail(ErrorCode::NoValidBases, "isolate '" + isolate.isolate_id + "' has no A/C/G/T bases");
    return static_cast<double>(gc) / static_cast<double>(total);
}

KmerHistogram histogram(const KmerCounts& counts) {
    KmerHistogram hist;
    for (const auto& [code, n] : counts.table) ++hist[n];
    return hist;
}

void write_histogram_tsv(std::ostream& out, const KmerHistogram& hist) {
    for (const auto& [occurrences, kmers] : hist) out << occurrences << '\t' << kmers << '\n';
}

KmerVocabulary::KmerVocabulary(KmerSpec spec, std::vector<KmerCode> codes)
    : spec_(spec), codes_(std::move(codes)) {}

std::optional<std::uint32_t> KmerVocabulary::column_of(KmerCode code) const {
    auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
    if (it == codes_.end() || *it != code) return std::nullopt;
    return static_cast<std::uint32_t>(it - codes_.begin());
}

KmerVocabulary build_vocabulary(std::span<const KmerCounts> counts_per_isolate) {
    if (counts_per_isolate.empty()) fail(ErrorCode::EmptyDataset, "no k-mer tables to merge");
    const KmerSpec spec = counts_per_isolate.front().spec;
    std::size_t total = 0;
    for (const auto& c : counts_per_isolate) {
        if (!(c.spec == spec)) fail(ErrorCode::MixedSpecs, "k-mer tables were counted with different specs");
        total += c.table.size();
    }
    std::vector<KmerCode> codes;
    codes.reserve(total);
    for (const auto& c : counts_per_isolate)
        for (const auto& [code, n] : c.table) codes.push_back(code);
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    codes.shrink_to_fit();
    return KmerVocabulary(spec, std::move(codes));
}

namespace detail {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) fail(ErrorCode::IoError, "failed reading '" + path.string() + "'");
    return data;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

void write_vocabulary_block(ByteWriter& out, const KmerVocabulary& vocab) {
    out.raw("KVOC1");
    out.u8(static_cast<std::uint8_t>(vocab.spec().k));
    out.u8(vocab.spec().canonical ? 1 : 0);
    out.u64(vocab.size());
    for (KmerCode c : vocab.codes()) out.u64(c);
}

KmerVocabulary read_vocabulary_block(ByteReader& in) {
    in.expect_magic("KVOC1");
    KmerSpec spec;
    spec.k = in.u8();
    if (spec.k < 1 || spec.k > kMaxK) in.corrupt("invalid k " + std::to_string(spec.k));
    std::uint8_t flag = in.u8();
    if (flag > 1) in.corrupt("invalid canonical flag");
    spec.canonical = flag == 1;
    std::uint64_t n = in.u64();
    in.check_count(n, 8);
    std::vector<KmerCode> codes(n);
    const KmerCode mask = kmer_mask(spec.k);
    for (std::uint64_t i = 0; i < n; ++i) {
        codes[i] = in.u64();
        if ((codes[i] & ~mask) != 0) in.corrupt("k-mer code exceeds 2k bits");
        if (i > 0 && codes[i] <= codes[i - 1]) in.corrupt("k-mer codes not strictly ascending");
        if (spec.canonical && canonical(codes[i], spec.k) != codes[i])
            in.corrupt("non-canonical code in canonical vocabulary");
    }
    return KmerVocabulary(spec, std::move(codes));
}

}  // namespace detail

void save_vocabulary(const KmerVocabulary& vocab, const std::filesystem::path& path) {
    detail::ByteWriter out;
    detail::write_vocabulary_block(out, vocab);
    detail::write_file(path, out.bytes());
}

KmerVocabulary load_vocabulary(const std::filesystem::path& path) {
    std::string data = detail::read_file(path);
    detail::ByteReader in(data, ErrorCode::CorruptVocabularyFile);
    KmerVocabulary vocab = detail::read_vocabulary_block(in);
    in.expect_end();
    return vocab;
}

}  // namespace amrkit

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "amrkit/evaluation.hpp"
#include "amrkit/forest.hpp"
#include "amrkit/kmer.hpp"

namespace amrkit {

inline constexpr std::string_view kUnannotatedRegion = "UNANNOTATED";

struct RegionAnnotation {
    KmerSpec spec;
    std::map<KmerCode, std::string> regions;  // keys canonical when spec.canonical

    bool operator==(const RegionAnnotation&) const = default;
};

// Two tab-separated columns: k-mer text, region id. Blank lines are skipped.
// Throws InconsistentK, AmbiguousBase, MalformedAnnotation, ConflictingAnnotation.
RegionAnnotation load_region_annotation(std::istream& in, const KmerSpec& spec);
void write_region_annotation(std::ostream& out, const RegionAnnotation& annotation);

// Sums feature importances per region; features without an annotation go to
// UNANNOTATED. Regions with no feature in the vocabulary are left out. Sorted
// by importance descending, then id ascending; top_n = 0 keeps everything.
// Throws FeatureCountMismatch, InconsistentK.
RegionRanking rank_regions(std::span<const double> importances, const KmerVocabulary& vocabulary,
                           const RegionAnnotation& annotation, std::size_t top_n = 0);
RegionRanking rank_regions(const ForestModel& model, const KmerVocabulary& vocabulary,
                           const RegionAnnotation& annotation, std::size_t top_n = 0);

struct StabilitySpec {
    std::vector<std::size_t> sizes;
    std::size_t repeats = 10;
    std::uint64_t seed = 0;
};

struct RegionStability {
    std::string region_id;
    std::vector<std::size_t> ranks;  // 1-based, one per repeat
    double median_rank = 0.0;
    std::size_t best_rank = 0;
    double top5_fraction = 0.0;  // share of repeats ranked 5 or better

    bool operator==(const RegionStability&) const = default;
};

struct StabilityTable {
    std::vector<std::size_t> sizes;
    std::size_t repeats = 0;
    std::uint64_t seed = 0;
    // Per size, regions ordered by median rank, then best rank, then id.
    std::vector<std::vector<RegionStability>> by_size;

    bool operator==(const StabilityTable&) const = default;
};

// Per (size, repeat) cell: stratified subsample, forest fit on it, full region
// ranking. Cell seeds follow cell_seed(). Throws SizeExceedsDataset.
StabilityTable rank_stability(const FeatureMatrix& matrix, const StabilitySpec& spec,
                              const RegionAnnotation& annotation, const ForestParams& params, unsigned threads = 1);

}  // namespace amrkit

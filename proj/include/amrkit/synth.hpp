#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "amrkit/regions.hpp"
#include "amrkit/sequence_io.hpp"

namespace amrkit {

inline constexpr std::string_view kPlantedRegion = "PLANTED";

struct SynthSpec {
    std::size_t n_isolates = 200;
    std::size_t n_contigs_per_isolate = 1;
    std::size_t contig_length = 5000;
    double resistant_fraction = 0.5;
    std::string marker = "GATTACAGGC";
    double marker_presence_in_res = 0.95;
    double marker_presence_in_sus = 0.05;
    double background_gc = 0.5;
    std::uint64_t seed = 0;

    // Throws InvalidParameter, MarkerLongerThanContig.
    void validate() const;
};

struct Insertion {
    std::string isolate_id;
    std::string contig_id;
    std::size_t position = 0;  // 0-based offset of the first marker base

    bool operator==(const Insertion&) const = default;
};

struct SynthCorpus {
    Dataset dataset;
    RegionAnnotation annotation;  // canonical marker -> PLANTED, k = marker length
    std::vector<Insertion> insertions;
};

// Background bases are i.i.d. with P(G) = P(C) = gc/2. The marker overwrites
// bases at a uniform position of one uniformly chosen contig. Chance copies of
// the marker (either strand) elsewhere are mutated away, so the insertion list
// is exactly the set of marker occurrences.
SynthCorpus generate_corpus(const SynthSpec& spec);

// Writes fasta/<isolate>.fasta, labels.tsv, annotation.tsv and truth.json.
void write_corpus(const SynthCorpus& corpus, const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace amrkit

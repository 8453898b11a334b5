#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace amrkit {

enum class Phenotype : unsigned char { SUS = 0, RES = 1 };

std::string_view to_string(Phenotype p);

// Case-insensitive; throws UnknownPhenotype.
Phenotype parse_phenotype(std::string_view token);

struct Contig {
    std::string id;
    std::string bases;  // uppercase IUPAC letters

    bool operator==(const Contig&) const = default;
};

struct Isolate {
    std::string isolate_id;
    std::vector<Contig> contigs;
    std::optional<Phenotype> label;
};

struct ClassCounts {
    std::size_t isolates = 0;
    std::size_t sus = 0;
    std::size_t res = 0;
    std::size_t unlabeled = 0;
};

struct Dataset {
    std::vector<Isolate> isolates;
    std::map<std::string, std::string> metadata;

    ClassCounts counts() const;
};

using LabelMap = std::map<std::string, Phenotype>;

// True for the 15 IUPAC nucleotide letters (either case).
bool is_iupac(char c);

// Parses '>'-headed records. Sequence lines are concatenated, whitespace is
// dropped and letters are uppercased. The record id is the header text up to
// the first whitespace. Throws MalformedFasta with the byte offset of the
// offending input.
std::vector<Contig> parse_fasta(std::istream& in);
std::vector<Contig> parse_fasta(std::string_view text);

void write_fasta(std::ostream& out, const std::vector<Contig>& contigs, std::size_t line_width = 80);

// Two-column TSV (isolate_id, phenotype), no header row.
LabelMap load_labels(std::istream& in);

struct AssembleOptions {
    // Replaces the file-stem id for the file at the same position when non-empty.
    std::vector<std::string> isolate_ids;
    unsigned threads = 1;
};

// One FASTA file per isolate; labels are joined by isolate id.
Dataset assemble_dataset(const std::vector<std::filesystem::path>& fasta_paths,
                         const LabelMap& labels,
                         const AssembleOptions& options = {});

}  // namespace amrkit

#include "amrkit/sequence_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "amrkit/error.hpp"
#include "amrkit/parallel.hpp"

namespace amrkit {

std::string_view to_string(Phenotype p) {
    return p == Phenotype::RES ? "RES" : "SUS";
}

Phenotype parse_phenotype(std::string_view token) {
    std::string upper(token);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "SUS") return Phenotype::SUS;
    if (upper == "RES") return Phenotype::RES;
    fail(ErrorCode::UnknownPhenotype, "unknown phenotype '" + std::string(token) + "'");
}

ClassCounts Dataset::counts() const {
    ClassCounts c;
    c.isolates = isolates.size();
    for (const auto& iso : isolates) {
        if (!iso.label) ++c.unlabeled;
        else if (*iso.label == Phenotype::RES) ++c.res;
        else ++c.sus;
    }
    return c;
}

bool is_iupac(char c) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
        case 'A': case 'C': case 'G': case 'T': case 'U':
        case 'R': case 'Y': case 'S': case 'W': case 'K': case 'M':
        case 'B': case 'D': case 'H': case 'V': case 'N':
            return true;
        default:
            return false;
    }
}

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

[[noreturn]] void fasta_error(std::size_t offset, const std::string& record, const std::string& what) {
    std::string msg = what + " at byte offset " + std::to_string(offset);
    if (!record.empty()) msg += " (record '" + record + "')";
    fail(ErrorCode::MalformedFasta, msg);
}

}  // namespace

std::vector<Contig> parse_fasta(std::string_view text) {
    std::vector<Contig> contigs;
    std::set<std::string> seen;
    std::size_t header_offset = 0;
    bool in_record = false;

    auto close_record = [&] {
        if (in_record && contigs.back().bases.empty())
            fasta_error(header_offset, contigs.back().id, "empty sequence");
    };

    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);

        if (!line.empty() && line.front() == '>') {
            close_record();
            std::string_view header = line.substr(1);
            std::size_t end = 0;
            while (end < header.size() && !is_space(header[end])) ++end;
            std::string id(header.substr(0, end));
            if (id.empty()) fasta_error(pos, "", "empty record id");
            if (!seen.insert(id).second) fasta_error(pos, id, "duplicate record id");
            contigs.push_back(Contig{std::move(id), {}});
            header_offset = pos;
            in_record = true;
        } else {
            for (std::size_t i = 0; i < line.size(); ++i) {
                char c = line[i];
                if (is_space(c)) continue;
                if (!in_record) fasta_error(pos + i, "", "sequence data before first header");
                if (!is_iupac(c))
                    fasta_error(pos + i, contigs.back().id,
                                std::string("invalid nucleotide '") + c + "'");
                contigs.back().bases.push_back(
                    static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
            }
        }
        pos = eol + 1;
    }
    close_record();
    return contigs;
}

std::vector<Contig> parse_fasta(std::istream& in) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) fail(ErrorCode::IoError, "failed to read FASTA stream");
    return parse_fasta(std::string_view(text));
}

void write_fasta(std::ostream& out, const std::vector<Contig>& contigs, std::size_t line_width) {
    if (line_width == 0) line_width = std::string::npos;
    for (const auto& c : contigs) {
        out << '>' << c.id << '\n';
        for (std::size_t i = 0; i < c.bases.size(); i += line_width) {
            out.write(c.bases.data() + i,
                      static_cast<std::streamsize>(std::min(line_width, c.bases.size() - i)));
            out << '\n';
        }
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

LabelMap load_labels(std::istream& in) {
    LabelMap labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty()) continue;
        std::size_t tab = view.find('\t');
        if (tab == std::string_view::npos || view.find('\t', tab + 1) != std::string_view::npos)
            fail(ErrorCode::MalformedLabelTable,
                 "line " + std::to_string(line_no) + ": expected two tab-separated columns");
        std::string id(trim(view.substr(0, tab)));
        std::string_view token = trim(view.substr(tab + 1));
        if (id.empty())
            fail(ErrorCode::MalformedLabelTable, "line " + std::to_string(line_no) + ": empty isolate id");
        Phenotype p = parse_phenotype(token);
        auto [it, inserted] = labels.emplace(id, p);
        if (!inserted && it->second != p)
            fail(ErrorCode::ConflictingLabel, "isolate '" + id + "' labeled both SUS and RES");
    }
    return labels;
}

Dataset assemble_dataset(const std::vector<std::filesystem::path>& fasta_paths,
                         const LabelMap& labels,
                         const AssembleOptions& options) {
    if (fasta_paths.empty()) fail(ErrorCode::EmptyDataset, "no input FASTA files");

    std::vector<std::string> ids(fasta_paths.size());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < fasta_paths.size(); ++i) {
        ids[i] = (i < options.isolate_ids.size() && !options.isolate_ids[i].empty())
                     ? options.isolate_ids[i]
                     : fasta_paths[i].stem().string();
        if (ids[i].empty())
            fail(ErrorCode::InvalidParameter, "cannot derive isolate id from '" + fasta_paths[i].string() + "'");
        if (!seen.insert(ids[i]).second)
            fail(ErrorCode::DuplicateIsolateId, "duplicate isolate id '" + ids[i] + "'");
    }

    Dataset ds;
    ds.isolates.resize(fasta_paths.size());
    parallel_for(fasta_paths.size(), options.threads, [&](std::size_t i) {
        std::ifstream in(fasta_paths[i], std::ios::binary);
        if (!in) fail(ErrorCode::IoError, "cannot open '" + fasta_paths[i].string() + "'");
        Isolate& iso = ds.isolates[i];
        iso.isolate_id = ids[i];
        try {
            iso.contigs = parse_fasta(in);
        } catch (const Error& e) {
            fail(e.code(), fasta_paths[i].string() + ": " + e.what());
        }
        if (iso.contigs.empty())
            fail(ErrorCode::MalformedFasta, fasta_paths[i].string() + ": no records");
        if (auto it = labels.find(ids[i]); it != labels.end()) iso.label = it->second;
    });

    if (!fasta_paths.empty()) ds.metadata["source"] = fasta_paths.front().parent_path().string();
    return ds;
}

}  // namespace amrkit

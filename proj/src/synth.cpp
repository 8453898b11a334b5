#include "amrkit/synth.hpp"

#include <cstdio>
#include <fstream>

#include "amrkit/error.hpp"
#include "amrkit/random.hpp"
#include "json.hpp"

namespace amrkit {

void SynthSpec::validate() const {
    if (n_isolates < 1) fail(ErrorCode::InvalidParameter, "n_isolates must be >= 1");
    if (n_contigs_per_isolate < 1) fail(ErrorCode::InvalidParameter, "n_contigs_per_isolate must be >= 1");
    if (marker.empty() || marker.size() > 32) fail(ErrorCode::InvalidParameter, "marker length must be 1..32");
    for (char c : marker)
        if (base_code(c) < 0) fail(ErrorCode::AmbiguousBase, "marker may contain only A, C, G, T");
    if (contig_length < marker.size())
        fail(ErrorCode::MarkerLongerThanContig, "marker of length " + std::to_string(marker.size()) +
                                                    " does not fit a contig of length " + std::to_string(contig_length));
    auto in_open = [](double x) { return x > 0.0 && x < 1.0; };
    auto in_closed = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_open(resistant_fraction)) fail(ErrorCode::InvalidParameter, "resistant_fraction must lie in (0, 1)");
    if (!in_open(background_gc)) fail(ErrorCode::InvalidParameter, "background_gc must lie in (0, 1)");
    if (!in_closed(marker_presence_in_res) || !in_closed(marker_presence_in_sus))
        fail(ErrorCode::InvalidParameter, "marker presence probabilities must lie in [0, 1]");
}

namespace {

std::string reverse_complement_text(std::string_view s) {
    std::string out(s.rbegin(), s.rend());
    for (char& c : out) {
        switch (c) {
            case 'A': c = 'T'; break;
            case 'C': c = 'G'; break;
            case 'G': c = 'C'; break;
            case 'T': c = 'A'; break;
        }
    }
    return out;
}

char random_base(Rng& rng, double gc) {
    const double u = uniform01(rng);
    if (u < gc / 2) return 'G';
    if (u < gc) return 'C';
    return u < gc + (1 - gc) / 2 ? 'A' : 'T';
}

// Mutates chance marker copies (either strand) until the only remaining one is
// the planted copy at `planted`, if any.
void scrub(std::string& bases, std::string_view marker, std::string_view marker_rc,
           std::optional<std::size_t> planted, Rng& rng, double gc) {
    const std::size_t m = marker.size();
    auto inside_planted = [&](std::size_t i) { return planted && i >= *planted && i < *planted + m; };
    for (bool dirty = true; dirty;) {
        dirty = false;
        for (std::size_t pos = 0; pos + m <= bases.size(); ++pos) {
            std::string_view window(bases.data() + pos, m);
            if (window != marker && window != marker_rc) continue;
            if (planted && pos == *planted) continue;
            std::size_t target = pos;
            while (inside_planted(target)) ++target;  // the window always reaches outside the planted copy
            const char old = bases[target];
            do bases[target] = random_base(rng, gc);
            while (bases[target] == old);
            dirty = true;
        }
    }
}

std::string isolate_name(std::size_t i, std::size_t n) {
    const int width = std::max<int>(4, static_cast<int>(std::to_string(n).size()));
    char buf[32];
    std::snprintf(buf, sizeof buf, "iso%0*zu", width, i + 1);
    return buf;
}

}  // namespace

SynthCorpus generate_corpus(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::string marker_rc = reverse_complement_text(spec.marker);
    const int k = static_cast<int>(spec.marker.size());

    SynthCorpus corpus;
    corpus.dataset.metadata["source"] = "synth";
    corpus.dataset.metadata["seed"] = std::to_string(spec.seed);
    corpus.annotation.spec = KmerSpec{k, true};
    corpus.annotation.regions[canonical(encode_kmer(spec.marker), k)] = std::string(kPlantedRegion);

    for (std::size_t i = 0; i < spec.n_isolates; ++i) {
        Isolate iso;
        iso.isolate_id = isolate_name(i, spec.n_isolates);
        const bool res = uniform01(rng) < spec.resistant_fraction;
        iso.label = res ? Phenotype::RES : Phenotype::SUS;
        for (std::size_t c = 0; c < spec.n_contigs_per_isolate; ++c) {
            Contig contig{iso.isolate_id + "_c" + std::to_string(c + 1), std::string(spec.contig_length, 'A')};
            for (char& b : contig.bases) b = random_base(rng, spec.background_gc);
            iso.contigs.push_back(std::move(contig));
        }
        const double presence = res ? spec.marker_presence_in_res : spec.marker_presence_in_sus;
        std::optional<std::size_t> planted_contig, planted_pos;
        if (uniform01(rng) < presence) {
            planted_contig = uniform_index(rng, spec.n_contigs_per_isolate);
            planted_pos = uniform_index(rng, spec.contig_length - spec.marker.size() + 1);
            iso.contigs[*planted_contig].bases.replace(*planted_pos, spec.marker.size(), spec.marker);
            corpus.insertions.push_back({iso.isolate_id, iso.contigs[*planted_contig].id, *planted_pos});
        }
        for (std::size_t c = 0; c < iso.contigs.size(); ++c)
            scrub(iso.contigs[c].bases, spec.marker, marker_rc,
                  planted_contig == c ? planted_pos : std::nullopt, rng, spec.background_gc);
        corpus.dataset.isolates.push_back(std::move(iso));
    }
    return corpus;
}

void write_corpus(const SynthCorpus& corpus, const SynthSpec& spec, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir / "fasta", ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + (out_dir / "fasta").string() + ": " + ec.message());

    auto open = [](const fs::path& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
        return out;
    };
    for (const Isolate& iso : corpus.dataset.isolates) {
        auto out = open(out_dir / "fasta" / (iso.isolate_id + ".fasta"));
        write_fasta(out, iso.contigs);
    }
    {
        auto out = open(out_dir / "labels.tsv");
        for (const Isolate& iso : corpus.dataset.isolates)
            out << iso.isolate_id << '\t' << to_string(*iso.label) << '\n';
    }
    {
        auto out = open(out_dir / "annotation.tsv");
        write_region_annotation(out, corpus.annotation);
    }
    nlohmann::ordered_json truth;
    truth["seed"] = spec.seed;
    truth["n_isolates"] = spec.n_isolates;
    truth["n_contigs_per_isolate"] = spec.n_contigs_per_isolate;
    truth["contig_length"] = spec.contig_length;
    truth["resistant_fraction"] = spec.resistant_fraction;
    truth["marker"] = spec.marker;
    truth["marker_presence_in_res"] = spec.marker_presence_in_res;
    truth["marker_presence_in_sus"] = spec.marker_presence_in_sus;
    truth["background_gc"] = spec.background_gc;
    truth["region"] = kPlantedRegion;
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const Insertion& ins : corpus.insertions)
        list.push_back({{"isolate_id", ins.isolate_id}, {"contig_id", ins.contig_id}, {"position", ins.position}});
    truth["insertions"] = std::move(list);
    auto out = open(out_dir / "truth.json");
    out << truth.dump(2) << '\n';
}

}  // namespace amrkit

#include "amrkit/regions.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "amrkit/error.hpp"
#include "amrkit/parallel.hpp"
#include "amrkit/training_set.hpp"

namespace amrkit {

namespace {

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

}  // namespace

RegionAnnotation load_region_annotation(std::istream& in, const KmerSpec& spec) {
    spec.validate();
    RegionAnnotation out{spec, {}};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = trim(line);
        if (text.empty()) continue;
        const auto tab = text.find('\t');
        const std::string where = "annotation line " + std::to_string(line_no);
        if (tab == std::string_view::npos) fail(ErrorCode::MalformedAnnotation, where + ": expected two tab-separated columns");
        std::string_view kmer = trim(text.substr(0, tab));
        std::string_view region = trim(text.substr(tab + 1));
        if (region.empty() || region.find('\t') != std::string_view::npos)
            fail(ErrorCode::MalformedAnnotation, where + ": bad region id");
        if (kmer.size() != static_cast<std::size_t>(spec.k))
            fail(ErrorCode::InconsistentK, where + ": k-mer length " + std::to_string(kmer.size()) +
                                               " but k = " + std::to_string(spec.k));
        std::string upper(kmer);
        std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
        KmerCode code = encode_kmer(upper);
        if (spec.canonical) code = canonical(code, spec.k);
        auto [it, inserted] = out.regions.emplace(code, std::string(region));
        if (!inserted && it->second != region)
            fail(ErrorCode::ConflictingAnnotation,
                 where + ": k-mer " + upper + " assigned to both " + it->second + " and " + std::string(region));
    }
    return out;
}

void write_region_annotation(std::ostream& out, const RegionAnnotation& annotation) {
    for (const auto& [code, region] : annotation.regions)
        out << decode_kmer(code, annotation.spec.k) << '\t' << region << '\n';
}

RegionRanking rank_regions(std::span<const double> importances, const KmerVocabulary& vocabulary,
                           const RegionAnnotation& annotation, std::size_t top_n) {
    if (importances.size() != vocabulary.size())
        fail(ErrorCode::FeatureCountMismatch, std::to_string(importances.size()) + " importances for " +
                                                  std::to_string(vocabulary.size()) + " vocabulary entries");
    if (!annotation.regions.empty() && !(annotation.spec == vocabulary.spec()))
        fail(ErrorCode::InconsistentK, "annotation and vocabulary use different k-mer specs");

    std::map<std::string, double> totals;
    std::optional<double> unannotated;
    for (std::size_t f = 0; f < importances.size(); ++f) {
        auto it = annotation.regions.find(vocabulary.codes()[f]);
        if (it == annotation.regions.end())
            unannotated = unannotated.value_or(0.0) + importances[f];
        else
            totals[it->second] += importances[f];
    }
    RegionRanking ranking;
    for (auto& [id, total] : totals) ranking.push_back({id, total});
    if (unannotated) ranking.push_back({std::string(kUnannotatedRegion), *unannotated});
    std::sort(ranking.begin(), ranking.end(), [](const RegionScore& a, const RegionScore& b) {
        if (a.importance != b.importance) return a.importance > b.importance;
        return a.region_id < b.region_id;
    });
    if (top_n > 0 && ranking.size() > top_n) ranking.resize(top_n);
    return ranking;
}

RegionRanking rank_regions(const ForestModel& model, const KmerVocabulary& vocabulary,
                           const RegionAnnotation& annotation, std::size_t top_n) {
    if (model.n_features != vocabulary.size())
        fail(ErrorCode::FeatureCountMismatch, "model has " + std::to_string(model.n_features) +
                                                  " features, vocabulary " + std::to_string(vocabulary.size()));
    return rank_regions(model.importances, vocabulary, annotation, top_n);
}

StabilityTable rank_stability(const FeatureMatrix& matrix, const StabilitySpec& spec,
                              const RegionAnnotation& annotation, const ForestParams& params, unsigned threads) {
    if (spec.sizes.empty()) fail(ErrorCode::InvalidParameter, "no subsample sizes given");
    if (spec.repeats < 1) fail(ErrorCode::InvalidParameter, "repeats must be >= 1");
    if (!std::is_sorted(spec.sizes.begin(), spec.sizes.end()))
        fail(ErrorCode::InvalidParameter, "sizes must be ascending");
    const std::vector<std::size_t> labeled = matrix.labeled_rows();
    if (spec.sizes.back() > labeled.size())
        fail(ErrorCode::SizeExceedsDataset, "size " + std::to_string(spec.sizes.back()) + " exceeds the " +
                                                std::to_string(labeled.size()) + " labeled rows");

    std::vector<RegionRanking> rankings(spec.sizes.size() * spec.repeats);
    parallel_for(rankings.size(), threads, [&](std::size_t cell) {
        const std::size_t si = cell / spec.repeats;
        const std::uint64_t seed = cell_seed(spec.seed, spec.sizes[si], cell % spec.repeats);
        Rng rng(derive_seed(seed, {1}));
        std::vector<std::size_t> subset = stratified_subsample(matrix, labeled, spec.sizes[si], rng);
        ForestParams p = params;
        p.seed = seed;
        ForestModel model = fit_forest(TrainingSet(matrix, subset), p);
        rankings[cell] = rank_regions(model, matrix.vocabulary, annotation);
    });

    StabilityTable table{spec.sizes, spec.repeats, spec.seed, {}};
    for (std::size_t si = 0; si < spec.sizes.size(); ++si) {
        std::map<std::string, RegionStability> per_region;
        for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
            const RegionRanking& ranking = rankings[si * spec.repeats + rep];
            for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
                RegionStability& s = per_region[ranking[pos].region_id];
                s.region_id = ranking[pos].region_id;
                s.ranks.resize(spec.repeats, 0);
                s.ranks[rep] = pos + 1;
            }
        }
        std::vector<RegionStability> rows;
        for (auto& [id, s] : per_region) {
            // Every cell ranks the same vocabulary, so each region has one rank per repeat.
            std::vector<std::size_t> sorted = s.ranks;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t n = sorted.size();
            s.median_rank = n % 2 ? static_cast<double>(sorted[n / 2])
                                  : 0.5 * static_cast<double>(sorted[n / 2 - 1] + sorted[n / 2]);
            s.best_rank = sorted.front();
            s.top5_fraction = static_cast<double>(std::count_if(sorted.begin(), sorted.end(),
                                                                [](std::size_t r) { return r <= 5; })) /
                              static_cast<double>(n);
            rows.push_back(std::move(s));
        }
        std::sort(rows.begin(), rows.end(), [](const RegionStability& a, const RegionStability& b) {
            if (a.median_rank != b.median_rank) return a.median_rank < b.median_rank;
            if (a.best_rank != b.best_rank) return a.best_rank < b.best_rank;
            return a.region_id < b.region_id;
        });
        table.by_size.push_back(std::move(rows));
    }
    return table;
}

}  // namespace amrkit

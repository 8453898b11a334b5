#include "amrkit/report.hpp"

#include <charconv>

#include "json.hpp"

namespace amrkit {

std::string format_double(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

std::string eval_report_json(const EvalReport& report) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["k"] = report.k;
    j["canonical"] = report.canonical;
    j["n_isolates"] = report.n_isolates;
    j["n_features"] = report.n_features;
    j["seed"] = report.seed;
    j["algorithm"] = report.algorithm;
    j["n_train"] = report.n_train;
    j["n_test"] = report.n_test;
    j["accuracy"] = report.accuracy;
    j["auc"] = report.roc.auc;
    ordered_json points = ordered_json::array();
    for (const RocPoint& p : report.roc.points) points.push_back({p.fpr, p.tpr});
    j["roc_points"] = std::move(points);
    ordered_json curve = ordered_json::array();
    for (const CurveStats& c : report.curve)
        curve.push_back({{"size", c.size}, {"mean_accuracy", c.mean_accuracy}, {"std_accuracy", c.std_accuracy}});
    j["curve"] = std::move(curve);
    ordered_json regions = ordered_json::array();
    for (const RegionScore& r : report.top_regions)
        regions.push_back({{"region_id", r.region_id}, {"importance", r.importance}});
    j["top_regions"] = std::move(regions);
    return j.dump(2) + "\n";
}

void write_roc_tsv(std::ostream& out, const RocCurve& roc) {
    out << "fpr\ttpr\n";
    for (const RocPoint& p : roc.points) out << format_double(p.fpr) << '\t' << format_double(p.tpr) << '\n';
}

void write_curve_tsv(std::ostream& out, const LearningCurve& curve) {
    out << "size\tmean_accuracy\tstd_accuracy\n";
    for (const CurveStats& c : curve.stats())
        out << c.size << '\t' << format_double(c.mean_accuracy) << '\t' << format_double(c.std_accuracy) << '\n';
}

void write_ranking_tsv(std::ostream& out, const RegionRanking& ranking) {
    out << "rank\tregion_id\timportance\n";
    for (std::size_t i = 0; i < ranking.size(); ++i)
        out << i + 1 << '\t' << ranking[i].region_id << '\t' << format_double(ranking[i].importance) << '\n';
}

void write_stability_tsv(std::ostream& out, const StabilityTable& table) {
    out << "size\tregion_id\tmedian_rank\tbest_rank\ttop5_fraction\tranks\n";
    for (std::size_t si = 0; si < table.sizes.size(); ++si) {
        for (const RegionStability& r : table.by_size[si]) {
            out << table.sizes[si] << '\t' << r.region_id << '\t' << format_double(r.median_rank) << '\t'
                << r.best_rank << '\t' << format_double(r.top5_fraction) << '\t';
            for (std::size_t i = 0; i < r.ranks.size(); ++i) out << (i ? "," : "") << r.ranks[i];
            out << '\n';
        }
    }
}

}  // namespace amrkit

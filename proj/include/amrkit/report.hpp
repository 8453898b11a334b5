#pragma once

#include <ostream>
#include <string>

#include "amrkit/evaluation.hpp"
#include "amrkit/regions.hpp"

namespace amrkit {

// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

// JSON with a fixed key order: k, canonical, n_isolates, n_features, seed,
// algorithm, n_train, n_test, accuracy, auc, roc_points, curve, top_regions.
std::string eval_report_json(const EvalReport& report);

// Tab-separated with a header line.
void write_roc_tsv(std::ostream& out, const RocCurve& roc);
void write_curve_tsv(std::ostream& out, const LearningCurve& curve);
void write_ranking_tsv(std::ostream& out, const RegionRanking& ranking);
void write_stability_tsv(std::ostream& out, const StabilityTable& table);

}  // namespace amrkit

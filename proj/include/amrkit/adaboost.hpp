#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "amrkit/training_set.hpp"

namespace amrkit {

// Depth-1 weak learner. polarity +1 votes RES when value > threshold,
// polarity -1 votes RES when value <= threshold.
struct Stump {
    std::uint32_t feature = 0;
    double threshold = 0.0;
    std::int32_t polarity = 1;

    // +1 (RES) or -1 (SUS).
    int vote(const SparseRow& row) const {
        const bool above = static_cast<double>(row.value_at(feature)) > threshold;
        return (above ? 1 : -1) * polarity;
    }

    bool operator==(const Stump&) const = default;
};

struct BoostParams {
    std::uint32_t n_rounds = 50;
    std::uint64_t seed = 0;  // recorded with the model; the fit itself is deterministic

    bool operator==(const BoostParams&) const = default;
};

struct BoostModel {
    std::vector<Stump> stumps;
    std::vector<double> alphas;
    std::size_t n_features = 0;
    BoostParams params;

    bool operator==(const BoostModel&) const = default;
};

// Per-round diagnostics of a boosting fit.
struct BoostTrace {
    std::vector<double> weighted_errors;
    std::vector<double> weight_sums;  // after renormalization
};

struct WeightedStump {
    Stump stump;
    double error = 0.0;
};

// Minimum weighted error over every feature, midpoint threshold and polarity;
// ties resolved by (error, feature, threshold, polarity). Nothing when no
// feature takes two distinct values.
std::optional<WeightedStump> best_stump(const TrainingSet& data, std::span<const double> weights);

// Discrete AdaBoost on {-1,+1} labels. Stops early when a stump classifies the
// training set perfectly or, after the first round, when error reaches 0.5.
// Throws SingleClassTraining, DegenerateWeakLearner.
BoostModel fit_adaboost(const TrainingSet& data, const BoostParams& params, BoostTrace* trace = nullptr);
BoostModel fit_adaboost(const FeatureMatrix& matrix, const BoostParams& params, BoostTrace* trace = nullptr);

// sum(alpha * vote) / sum(alpha), in [-1, 1].
double boost_decision(const BoostModel& model, const SparseRow& row);

// (decision + 1) / 2, usable as a RES score.
double boost_predict_proba(const BoostModel& model, const SparseRow& row);

}  // namespace amrkit

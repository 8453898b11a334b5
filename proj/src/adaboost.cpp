#include "amrkit/adaboost.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "amrkit/error.hpp"

namespace amrkit {

namespace {

bool better(const WeightedStump& a, const WeightedStump& b) {
    return std::tie(a.error, a.stump.feature, a.stump.threshold, a.stump.polarity) <
           std::tie(b.error, b.stump.feature, b.stump.threshold, b.stump.polarity);
}

}  // namespace

std::optional<WeightedStump> best_stump(const TrainingSet& data, std::span<const double> weights) {
    if (weights.size() != data.n_samples()) fail(ErrorCode::LengthMismatch, "one weight per sample required");

    double total_sus = 0, total_res = 0;
    for (std::size_t s = 0; s < data.n_samples(); ++s) (data.is_res(s) ? total_res : total_sus) += weights[s];

    struct Group {
        std::uint32_t value;
        double sus, res;
    };
    std::vector<Group> groups;
    std::optional<WeightedStump> best;
    const auto p = static_cast<std::uint32_t>(data.n_features());
    for (std::uint32_t f = 0; f < p; ++f) {
        auto column = data.column(f);
        if (column.empty()) continue;
        groups.clear();
        double nz_sus = 0, nz_res = 0;
        for (const auto& e : column) {
            if (groups.empty() || groups.back().value != e.value) groups.push_back({e.value, 0, 0});
            if (data.is_res(e.sample)) {
                groups.back().res += weights[e.sample];
                nz_res += weights[e.sample];
            } else {
                groups.back().sus += weights[e.sample];
                nz_sus += weights[e.sample];
            }
        }
        const bool has_zero = column.size() < data.n_samples();
        if (groups.size() + (has_zero ? 1 : 0) < 2) continue;

        double left_sus = has_zero ? total_sus - nz_sus : 0.0;
        double left_res = has_zero ? total_res - nz_res : 0.0;
        double prev = 0.0;
        bool have_left = has_zero;
        for (const Group& g : groups) {
            if (have_left) {
                const double threshold = (prev + static_cast<double>(g.value)) / 2.0;
                const double right_sus = total_sus - left_sus;
                const double right_res = total_res - left_res;
                // RES above the threshold, or RES at/below it.
                WeightedStump pos{{f, threshold, 1}, left_res + right_sus};
                WeightedStump neg{{f, threshold, -1}, left_sus + right_res};
                for (const WeightedStump* c : {&neg, &pos})
                    if (!best || better(*c, *best)) best = *c;
            }
            left_sus += g.sus;
            left_res += g.res;
            prev = static_cast<double>(g.value);
            have_left = true;
        }
    }
    return best;
}

BoostModel fit_adaboost(const TrainingSet& data, const BoostParams& params, BoostTrace* trace) {
    if (data.n_res() == 0 || data.n_sus() == 0)
        fail(ErrorCode::SingleClassTraining, "training data must contain both SUS and RES samples");
    if (params.n_rounds < 1) fail(ErrorCode::InvalidParameter, "n_rounds must be >= 1");

    const std::size_t n = data.n_samples();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<int> votes(n);
    BoostModel model;
    model.n_features = data.n_features();
    model.params = params;

    for (std::uint32_t round = 0; round < params.n_rounds; ++round) {
        std::optional<WeightedStump> found = best_stump(data, w);
        if (!found) {
            if (round == 0) fail(ErrorCode::DegenerateWeakLearner, "no feature varies across the training set");
            break;
        }
        // Recompute the error from the votes rather than trusting the sweep's
        // running sums.
        double error = 0;
        std::size_t mistakes = 0;
        for (std::size_t s = 0; s < n; ++s) {
            votes[s] = found->stump.vote(data.row(s));
            if ((votes[s] > 0) != data.is_res(s)) {
                error += w[s];
                ++mistakes;
            }
        }
        if (error >= 0.5) {
            if (round == 0)
                fail(ErrorCode::DegenerateWeakLearner,
                     "best stump has weighted error " + std::to_string(error) + " >= 0.5");
            break;
        }
        const double eps = std::clamp(error, 1e-10, 1.0 - 1e-10);
        const double alpha = 0.5 * std::log((1.0 - eps) / eps);
        model.stumps.push_back(found->stump);
        model.alphas.push_back(alpha);

        double sum = 0;
        for (std::size_t s = 0; s < n; ++s) {
            const int y = data.is_res(s) ? 1 : -1;
            w[s] *= std::exp(-alpha * y * votes[s]);
            sum += w[s];
        }
        double renormalized = 0;
        for (double& v : w) {
            v /= sum;
            renormalized += v;
        }
        if (trace != nullptr) {
            trace->weighted_errors.push_back(error);
            trace->weight_sums.push_back(renormalized);
        }
        if (mistakes == 0) break;
    }
    return model;
}

BoostModel fit_adaboost(const FeatureMatrix& matrix, const BoostParams& params, BoostTrace* trace) {
    return fit_adaboost(TrainingSet(matrix), params, trace);
}

double boost_decision(const BoostModel& model, const SparseRow& row) {
    if (!row.indices.empty() && row.indices.back() >= model.n_features)
        fail(ErrorCode::IndexOutOfRange, "row has a feature index beyond the model's features");
    double score = 0, norm = 0;
    for (std::size_t i = 0; i < model.stumps.size(); ++i) {
        score += model.alphas[i] * model.stumps[i].vote(row);
        norm += model.alphas[i];
    }
    return norm > 0 ? score / norm : 0.0;
}

double boost_predict_proba(const BoostModel& model, const SparseRow& row) {
    return (boost_decision(model, row) + 1.0) / 2.0;
}

}  // namespace amrkit

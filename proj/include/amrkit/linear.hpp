#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "amrkit/training_set.hpp"

namespace amrkit {

struct LinearParams {
    double lambda = 0.01;
    std::uint32_t max_iters = 1000;  // sweeps
    double tolerance = 1e-6;         // on the largest standardized coordinate update

    bool operator==(const LinearParams&) const = default;
};

// Weights and intercept are in the original feature scale.
struct LinearModel {
    std::vector<double> weights;
    double intercept = 0.0;
    double lambda = 0.0;
    double objective = 0.0;  // mean logistic loss + lambda * |w_std|_1 at exit
    std::uint32_t iterations = 0;
    bool converged = false;

    std::size_t nonzero_count() const;

    bool operator==(const LinearModel&) const = default;
};

// Mean logistic loss over internally standardized features
// z_ij = (x_ij - mean_j) / sd_j (population sd; constant columns are inert).
class LogisticProblem {
public:
    explicit LogisticProblem(const TrainingSet& data);

    std::size_t n_samples() const { return n_; }
    std::size_t n_features() const { return mean_.size(); }
    bool is_constant(std::size_t j) const { return scale_[j] == 0.0; }
    double mean(std::size_t j) const { return mean_[j]; }
    double scale(std::size_t j) const { return scale_[j]; }

    // Linear predictor b + sum_j w_j z_ij for every sample.
    std::vector<double> linear_predictor(std::span<const double> w_std, double intercept) const;

    double loss(std::span<const double> w_std, double intercept) const;
    double objective(std::span<const double> w_std, double intercept, double lambda) const;

    // d loss / d w_j for j < n_features(); j == n_features() is the intercept.
    double gradient(std::span<const double> w_std, double intercept, std::size_t j) const;

    // Same derivative from residuals r_i = sigmoid(eta_i) - y_i, given
    // sum_i r_i. This is the form the coordinate-descent solver uses.
    double gradient_from_residuals(std::span<const double> residuals, double residual_sum, std::size_t j) const;

    const TrainingSet& data() const { return *data_; }
    bool y(std::size_t i) const { return data_->is_res(i); }

private:
    const TrainingSet* data_;
    std::size_t n_;
    std::vector<double> mean_;
    std::vector<double> scale_;
};

struct LinearTrace {
    std::vector<double> objective_per_sweep;
};

// Logistic loss + lambda * sum |w_j| with an unpenalized intercept, by cyclic
// coordinate descent with soft-thresholding. Each coordinate tries a Newton
// step and falls back to the curvature-bound (1/4) step, accepting only moves
// that do not raise the objective. Throws SingleClassTraining.
LinearModel fit_l1_linear(const TrainingSet& data, const LinearParams& params, LinearTrace* trace = nullptr);
LinearModel fit_l1_linear(const FeatureMatrix& matrix, const LinearParams& params, LinearTrace* trace = nullptr);

double sigmoid(double x);

// sigmoid(w . x + b). Throws IndexOutOfRange.
double linear_predict_score(const LinearModel& model, const SparseRow& row);

}  // namespace amrkit

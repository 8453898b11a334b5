#include "amrkit/linear.hpp"

#include <algorithm>
#include <cmath>

#include "amrkit/error.hpp"

namespace amrkit {

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {

// log(1 + e^x)
double softplus(double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

double mean_loss(std::span<const double> eta, const TrainingSet& data) {
    double sum = 0;
    for (std::size_t i = 0; i < eta.size(); ++i) sum += softplus(eta[i]) - (data.is_res(i) ? eta[i] : 0.0);
    return sum / static_cast<double>(eta.size());
}

}  // namespace

std::size_t LinearModel::nonzero_count() const {
    return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w != 0.0; }));
}

LogisticProblem::LogisticProblem(const TrainingSet& data)
    : data_(&data), n_(data.n_samples()), mean_(data.n_features(), 0.0), scale_(data.n_features(), 0.0) {
    const double n = static_cast<double>(n_);
    for (std::uint32_t j = 0; j < data.n_features(); ++j) {
        auto col = data.column(j);
        if (col.empty()) continue;
        const bool all_present = col.size() == n_;
        if (all_present && col.front().value == col.back().value) continue;  // sorted by value
        double sum = 0;
        for (const auto& e : col) sum += e.value;
        const double mu = sum / n;
        double ss = static_cast<double>(n_ - col.size()) * mu * mu;
        for (const auto& e : col) ss += (e.value - mu) * (e.value - mu);
        mean_[j] = mu;
        scale_[j] = std::sqrt(ss / n);
    }
}

std::vector<double> LogisticProblem::linear_predictor(std::span<const double> w_std, double intercept) const {
    double offset = intercept;
    for (std::size_t j = 0; j < w_std.size(); ++j)
        if (w_std[j] != 0.0 && !is_constant(j)) offset -= w_std[j] * mean_[j] / scale_[j];
    std::vector<double> eta(n_, offset);
    for (std::uint32_t j = 0; j < w_std.size(); ++j) {
        if (w_std[j] == 0.0 || is_constant(j)) continue;
        const double coef = w_std[j] / scale_[j];
        for (const auto& e : data_->column(j)) eta[e.sample] += coef * e.value;
    }
    return eta;
}

double LogisticProblem::loss(std::span<const double> w_std, double intercept) const {
    return mean_loss(linear_predictor(w_std, intercept), *data_);
}

double LogisticProblem::objective(std::span<const double> w_std, double intercept, double lambda) const {
    double l1 = 0;
    for (double w : w_std) l1 += std::abs(w);
    return loss(w_std, intercept) + lambda * l1;
}

double LogisticProblem::gradient_from_residuals(std::span<const double> residuals, double residual_sum,
                                                std::size_t j) const {
    const double n = static_cast<double>(n_);
    if (j == n_features()) return residual_sum / n;
    if (is_constant(j)) return 0.0;
    double dot = 0;
    for (const auto& e : data_->column(static_cast<std::uint32_t>(j))) dot += e.value * residuals[e.sample];
    return (dot - mean_[j] * residual_sum) / (n * scale_[j]);
}

double LogisticProblem::gradient(std::span<const double> w_std, double intercept, std::size_t j) const {
    std::vector<double> eta = linear_predictor(w_std, intercept);
    double sum = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        eta[i] = sigmoid(eta[i]) - (data_->is_res(i) ? 1.0 : 0.0);
        sum += eta[i];
    }
    return gradient_from_residuals(eta, sum, j);
}

namespace {

class CoordinateDescent {
public:
    CoordinateDescent(const LogisticProblem& problem, double lambda)
        : prob_(problem),
          data_(problem.data()),
          lambda_(lambda),
          n_(problem.n_samples()),
          p_(problem.n_features()),
          w_(p_, 0.0),
          eta_(n_),
          trial_(n_),
          resid_(n_),
          curv_(n_) {
        intercept_ = std::log(static_cast<double>(data_.n_res()) / static_cast<double>(data_.n_sus()));
        std::fill(eta_.begin(), eta_.end(), intercept_);
        loss_ = mean_loss(eta_, data_);
        refresh_residuals();
    }

    // One pass over the intercept and then `coords` in order; returns the
    // largest accepted |update|.
    double sweep(const std::vector<std::uint32_t>& coords) {
        double max_delta = update(p_);
        for (std::uint32_t j : coords) max_delta = std::max(max_delta, update(j));
        return max_delta;
    }

    double objective() const {
        double l1 = 0;
        for (double w : w_) l1 += std::abs(w);
        return loss_ + lambda_ * l1;
    }

    const std::vector<double>& weights() const { return w_; }
    double intercept() const { return intercept_; }

private:
    void refresh_residuals() {
        resid_sum_ = 0;
        curv_sum_ = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double pr = sigmoid(eta_[i]);
            resid_[i] = pr - (data_.is_res(i) ? 1.0 : 0.0);
            curv_[i] = pr * (1.0 - pr);
            resid_sum_ += resid_[i];
            curv_sum_ += curv_[i];
        }
    }

    // (1/n) sum_i p_i (1 - p_i) z_ij^2
    double curvature(std::size_t j) const {
        const double n = static_cast<double>(n_);
        if (j == p_) return curv_sum_ / n;
        const double mu = prob_.mean(j);
        const double sd = prob_.scale(j);
        double qx = 0, qxx = 0;
        for (const auto& e : data_.column(static_cast<std::uint32_t>(j))) {
            qx += curv_[e.sample] * e.value;
            qxx += curv_[e.sample] * e.value * e.value;
        }
        return (qxx - 2.0 * mu * qx + mu * mu * curv_sum_) / (n * sd * sd);
    }

    double current(std::size_t j) const { return j == p_ ? intercept_ : w_[j]; }

    double update(std::size_t j) {
        if (j < p_ && prob_.is_constant(j)) return 0.0;
        const double penalty = j == p_ ? 0.0 : lambda_;
        const double g = prob_.gradient_from_residuals(resid_, resid_sum_, j);
        const double wj = current(j);
        if (wj == 0.0 && std::abs(g) <= penalty) return 0.0;

        const double h = curvature(j);
        if (h > 1e-12) {
            const double newton = soft_threshold(wj - g / h, penalty / h);
            if (newton != wj && try_move(j, newton - wj, penalty)) return std::abs(newton - wj);
        }
        // Logistic curvature never exceeds 1/4 on standardized columns.
        const double bounded = soft_threshold(wj - 4.0 * g, 4.0 * penalty);
        if (bounded != wj && try_move(j, bounded - wj, penalty)) return std::abs(bounded - wj);
        return 0.0;
    }

    bool try_move(std::size_t j, double delta, double penalty) {
        if (j == p_) {
            for (std::size_t i = 0; i < n_; ++i) trial_[i] = eta_[i] + delta;
        } else {
            const double shift = -delta * prob_.mean(j) / prob_.scale(j);
            const double coef = delta / prob_.scale(j);
            for (std::size_t i = 0; i < n_; ++i) trial_[i] = eta_[i] + shift;
            for (const auto& e : data_.column(static_cast<std::uint32_t>(j))) trial_[e.sample] += coef * e.value;
        }
        const double new_loss = mean_loss(trial_, data_);
        const double wj = current(j);
        const double change = (new_loss - loss_) + penalty * (std::abs(wj + delta) - std::abs(wj));
        if (!(change <= 0.0)) return false;
        eta_.swap(trial_);
        loss_ = new_loss;
        (j == p_ ? intercept_ : w_[j]) = wj + delta;
        refresh_residuals();
        return true;
    }

    const LogisticProblem& prob_;
    const TrainingSet& data_;
    double lambda_;
    std::size_t n_, p_;
    std::vector<double> w_;
    double intercept_ = 0;
    std::vector<double> eta_, trial_, resid_, curv_;
    double resid_sum_ = 0, curv_sum_ = 0;
    double loss_ = 0;
};

}  // namespace

LinearModel fit_l1_linear(const TrainingSet& data, const LinearParams& params, LinearTrace* trace) {
    if (data.n_res() == 0 || data.n_sus() == 0)
        fail(ErrorCode::SingleClassTraining, "training data must contain both SUS and RES samples");
    if (!(params.lambda >= 0) || !std::isfinite(params.lambda))
        fail(ErrorCode::InvalidParameter, "lambda must be finite and >= 0");
    if (!(params.tolerance > 0)) fail(ErrorCode::InvalidParameter, "tolerance must be > 0");

    LogisticProblem problem(data);
    CoordinateDescent cd(problem, params.lambda);

    std::vector<std::uint32_t> all;
    for (std::uint32_t j = 0; j < problem.n_features(); ++j)
        if (!problem.is_constant(j)) all.push_back(j);

    // Sweeps alternate between the full coordinate set and the active
    // (nonzero) set; convergence is only declared after a quiet full sweep.
    LinearModel model;
    model.lambda = params.lambda;
    bool full = true;
    std::vector<std::uint32_t> active;
    while (model.iterations < params.max_iters) {
        const double max_delta = cd.sweep(full ? all : active);
        ++model.iterations;
        if (trace != nullptr) trace->objective_per_sweep.push_back(cd.objective());
        if (max_delta < params.tolerance) {
            if (full) {
                model.converged = true;
                break;
            }
            full = true;
            continue;
        }
        if (full) {
            active.clear();
            for (std::uint32_t j : all)
                if (cd.weights()[j] != 0.0) active.push_back(j);
            full = false;
        }
    }

    model.weights.assign(problem.n_features(), 0.0);
    model.intercept = cd.intercept();
    for (std::size_t j = 0; j < problem.n_features(); ++j) {
        const double w = cd.weights()[j];
        if (w == 0.0) continue;
        model.weights[j] = w / problem.scale(j);
        model.intercept -= w * problem.mean(j) / problem.scale(j);
    }
    model.objective = cd.objective();
    return model;
}

LinearModel fit_l1_linear(const FeatureMatrix& matrix, const LinearParams& params, LinearTrace* trace) {
    return fit_l1_linear(TrainingSet(matrix), params, trace);
}

double linear_predict_score(const LinearModel& model, const SparseRow& row) {
    if (!row.indices.empty() && row.indices.back() >= model.weights.size())
        fail(ErrorCode::IndexOutOfRange, "row has a feature index beyond the model's weights");
    double z = model.intercept;
    for (std::size_t j = 0; j < row.nnz(); ++j) z += model.weights[row.indices[j]] * row.values[j];
    return sigmoid(z);
}

}  // namespace amrkit

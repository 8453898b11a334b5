#include "amrkit/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amrkit/error.hpp"

namespace amrkit {

double gini_impurity(double sus, double res) {
    const double n = sus + res;
    if (!(n > 0)) fail(ErrorCode::EmptyNode, "gini impurity of an empty node");
    const double ps = sus / n;
    const double pr = res / n;
    return 1.0 - ps * ps - pr * pr;
}

std::size_t MaxFeatures::resolve(std::size_t n_features) const {
    switch (rule) {
        case Rule::Sqrt:
            return std::max<std::size_t>(
                1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features)))));
        case Rule::All:
            return n_features;
        case Rule::Fixed:
            if (m < 1 || m > n_features)
                fail(ErrorCode::InvalidParameter, "max_features " + std::to_string(m) +
                                                      " outside [1, " + std::to_string(n_features) + "]");
            return static_cast<std::size_t>(m);
    }
    return n_features;
}

namespace {

struct ScanResult {
    bool varies = false;  // feature takes >= 2 distinct values in the node
    double threshold = 0.0;
    double decrease = 0.0;
};

// Decreases closer than this count as equal, so ties break on feature index
// and threshold rather than on rounding noise.
constexpr double kTieTolerance = 1e-12;

// Scores candidate features against the samples of one node. Node membership
// is tracked with a per-sample token so a column scan can skip other nodes'
// samples in O(1).
class SplitSearch {
public:
    SplitSearch(const TrainingSet& data, std::span<const std::uint32_t> weights)
        : data_(data), weights_(weights), mark_(data.n_samples(), 0) {}

    void enter_node(std::span<const std::uint32_t> samples) {
        ++token_;
        for (std::uint32_t s : samples) mark_[s] = token_;
    }

    ScanResult scan(std::uint32_t feature, double node_sus, double node_res) {
        groups_.clear();
        double nz_sus = 0, nz_res = 0;
        for (const auto& e : data_.column(feature)) {
            if (mark_[e.sample] != token_) continue;
            const double w = weights_[e.sample];
            if (groups_.empty() || groups_.back().value != e.value) groups_.push_back({e.value, 0, 0});
            if (data_.is_res(e.sample)) {
                groups_.back().res += w;
                nz_res += w;
            } else {
                groups_.back().sus += w;
                nz_sus += w;
            }
        }
        const double zero_sus = node_sus - nz_sus;
        const double zero_res = node_res - nz_res;
        const bool has_zero = zero_sus + zero_res > 0;

        ScanResult out;
        if (groups_.size() + (has_zero ? 1 : 0) < 2) return out;
        out.varies = true;

        const double n = node_sus + node_res;
        const double parent = gini_impurity(node_sus, node_res);
        double left_sus = zero_sus, left_res = zero_res;
        double prev = 0.0;
        bool have_left = has_zero;
        bool have_best = false;
        for (const Group& g : groups_) {
            if (have_left) {
                const double right_sus = node_sus - left_sus;
                const double right_res = node_res - left_res;
                const double nl = left_sus + left_res;
                const double nr = right_sus + right_res;
                const double dec = parent - (nl / n) * gini_impurity(left_sus, left_res) -
                                   (nr / n) * gini_impurity(right_sus, right_res);
                if (!have_best || dec > out.decrease + kTieTolerance) {
                    have_best = true;
                    out.decrease = dec;
                    out.threshold = (prev + static_cast<double>(g.value)) / 2.0;
                }
            }
            left_sus += g.sus;
            left_res += g.res;
            prev = static_cast<double>(g.value);
            have_left = true;
        }
        return out;
    }

private:
    struct Group {
        std::uint32_t value;
        double sus;
        double res;
    };

    const TrainingSet& data_;
    std::span<const std::uint32_t> weights_;
    std::vector<std::uint32_t> mark_;
    std::uint32_t token_ = 0;
    std::vector<Group> groups_;
};

struct Candidate {
    bool found = false;
    std::uint32_t feature = 0;
    double threshold = 0.0;
    double decrease = 0.0;

    void offer(std::uint32_t f, const ScanResult& r) {
        if (!r.varies) return;
        if (!found || r.decrease > decrease + kTieTolerance ||
            (r.decrease >= decrease - kTieTolerance && f < feature)) {
            found = true;
            feature = f;
            threshold = r.threshold;
            decrease = r.decrease;
        }
    }
};

class TreeBuilder {
public:
    TreeBuilder(const TrainingSet& data, std::span<const std::uint32_t> weights, const TreeParams& params,
                Rng& rng, std::vector<double>* importances)
        : data_(data),
          weights_(weights),
          params_(params),
          rng_(rng),
          importances_(importances),
          search_(data, weights),
          n_features_(data.n_features()),
          m_(params.max_features.resolve(data.n_features())),
          feature_mark_(data.n_features(), 0) {}

    DecisionTree build() {
        for (std::uint32_t s = 0; s < data_.n_samples(); ++s)
            if (weights_[s] > 0) order_.push_back(s);
        if (order_.empty()) fail(ErrorCode::NoLabeledSamples, "no samples with positive weight");

        root_weight_ = 0;
        for (std::uint32_t s : order_) root_weight_ += weights_[s];

        struct Pending {
            std::size_t start, end;
            std::uint32_t depth;
            std::int64_t parent;
            bool is_left;
        };
        std::vector<Pending> stack{{0, order_.size(), 0, -1, false}};
        while (!stack.empty()) {
            Pending job = stack.back();
            stack.pop_back();

            const auto index = static_cast<std::uint32_t>(tree_.nodes.size());
            tree_.nodes.emplace_back();
            if (job.parent >= 0) {
                TreeNode& parent = tree_.nodes[static_cast<std::size_t>(job.parent)];
                (job.is_left ? parent.left : parent.right) = index;
            }

            std::span<std::uint32_t> samples(order_.data() + job.start, job.end - job.start);
            std::uint64_t n_sus = 0, n_res = 0;
            for (std::uint32_t s : samples) (data_.is_res(s) ? n_res : n_sus) += weights_[s];
            tree_.nodes[index].n_sus = static_cast<std::uint32_t>(n_sus);
            tree_.nodes[index].n_res = static_cast<std::uint32_t>(n_res);

            const bool pure = n_sus == 0 || n_res == 0;
            const bool depth_limited = params_.max_depth > 0 && job.depth >= params_.max_depth;
            if (pure || depth_limited || n_sus + n_res < params_.min_samples_split) continue;

            Candidate best = find_split(samples, static_cast<double>(n_sus), static_cast<double>(n_res));
            if (!best.found) continue;

            TreeNode& node = tree_.nodes[index];
            node.feature = static_cast<std::int32_t>(best.feature);
            node.threshold = best.threshold;
            if (importances_ != nullptr)
                (*importances_)[best.feature] +=
                    (static_cast<double>(n_sus + n_res) / static_cast<double>(root_weight_)) *
                    std::max(0.0, best.decrease);

            auto mid = std::stable_partition(samples.begin(), samples.end(), [&](std::uint32_t s) {
                return static_cast<double>(data_.row(s).value_at(best.feature)) <= best.threshold;
            });
            const std::size_t split_at = job.start + static_cast<std::size_t>(mid - samples.begin());
            stack.push_back({split_at, job.end, job.depth + 1, index, false});
            stack.push_back({job.start, split_at, job.depth + 1, index, true});
        }
        return std::move(tree_);
    }

private:
    // Candidate features are drawn uniformly without replacement until m_ of
    // them vary within the node (or none remain). Features absent from every
    // node sample are constant zero, so when the node is small the draw runs
    // over the features present in it, which yields the same distribution.
    Candidate find_split(std::span<const std::uint32_t> samples, double n_sus, double n_res) {
        search_.enter_node(samples);
        Candidate best;

        std::size_t node_nnz = 0;
        for (std::uint32_t s : samples) node_nnz += data_.row(s).nnz();

        if (m_ >= n_features_ || node_nnz < n_features_ / 8) {
            ++feature_token_;
            present_.clear();
            for (std::uint32_t s : samples)
                for (std::uint32_t f : data_.row(s).indices)
                    if (feature_mark_[f] != feature_token_) {
                        feature_mark_[f] = feature_token_;
                        present_.push_back(f);
                    }
            if (m_ >= n_features_) {
                // index order without sorting: walk the marks
                for (std::uint32_t f = 0; f < n_features_; ++f)
                    if (feature_mark_[f] == feature_token_) best.offer(f, search_.scan(f, n_sus, n_res));
            } else {
                draw_until(present_, best, n_sus, n_res);
            }
        } else {
            if (permutation_.empty()) {
                permutation_.resize(n_features_);
                std::iota(permutation_.begin(), permutation_.end(), 0u);
            }
            draw_until(permutation_, best, n_sus, n_res);
        }
        return best;
    }

    void draw_until(std::vector<std::uint32_t>& pool, Candidate& best, double n_sus, double n_res) {
        std::size_t varying = 0;
        for (std::size_t i = 0; i < pool.size() && varying < m_; ++i) {
            std::size_t j = i + uniform_index(rng_, pool.size() - i);
            std::swap(pool[i], pool[j]);
            ScanResult r = search_.scan(pool[i], n_sus, n_res);
            if (r.varies) {
                ++varying;
                best.offer(pool[i], r);
            }
        }
    }

    const TrainingSet& data_;
    std::span<const std::uint32_t> weights_;
    const TreeParams& params_;
    Rng& rng_;
    std::vector<double>* importances_;
    SplitSearch search_;
    std::size_t n_features_;
    std::size_t m_;
    std::vector<std::uint32_t> feature_mark_;
    std::uint32_t feature_token_ = 0;
    std::vector<std::uint32_t> present_;
    std::vector<std::uint32_t> permutation_;
    std::vector<std::uint32_t> order_;
    std::uint64_t root_weight_ = 0;
    DecisionTree tree_;
};

}  // namespace

std::optional<Split> best_split(const TrainingSet& data, std::span<const std::uint32_t> candidate_features) {
    std::vector<std::uint32_t> ones(data.n_samples(), 1);
    std::vector<std::uint32_t> all(data.n_samples());
    std::iota(all.begin(), all.end(), 0u);
    SplitSearch search(data, ones);
    search.enter_node(all);
    const auto n_res = static_cast<double>(data.n_res());
    const auto n_sus = static_cast<double>(data.n_sus());
    Candidate best;
    for (std::uint32_t f : candidate_features) {
        if (f >= data.n_features())
            fail(ErrorCode::IndexOutOfRange, "candidate feature " + std::to_string(f) + " beyond matrix");
        best.offer(f, search.scan(f, n_sus, n_res));
    }
    if (!best.found || !(best.decrease > 1e-12)) return std::nullopt;
    return Split{best.feature, best.threshold, best.decrease};
}

DecisionTree fit_tree(const TrainingSet& data, std::span<const std::uint32_t> sample_weights,
                      const TreeParams& params, Rng& rng, std::vector<double>* importances) {
    if (sample_weights.size() != data.n_samples())
        fail(ErrorCode::LengthMismatch, "one weight per sample required");
    if (params.min_samples_split < 2) fail(ErrorCode::InvalidParameter, "min_samples_split must be >= 2");
    if (importances != nullptr) importances->assign(data.n_features(), 0.0);
    return TreeBuilder(data, sample_weights, params, rng, importances).build();
}

DecisionTree fit_tree(const TrainingSet& data, const TreeParams& params, Rng& rng) {
    std::vector<std::uint32_t> ones(data.n_samples(), 1);
    return fit_tree(data, ones, params, rng);
}

const TreeNode& DecisionTree::leaf_for(const SparseRow& row) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const TreeNode& n = nodes[i];
        const double v = row.value_at(static_cast<std::uint32_t>(n.feature));
        i = v <= n.threshold ? n.left : n.right;
    }
    return nodes[i];
}

std::size_t DecisionTree::depth() const {
    if (nodes.empty()) return 0;
    std::size_t deepest = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [i, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        if (!nodes[i].is_leaf()) {
            stack.emplace_back(nodes[i].left, d + 1);
            stack.emplace_back(nodes[i].right, d + 1);
        }
    }
    return deepest;
}

std::size_t DecisionTree::n_leaves() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

}  // namespace amrkit

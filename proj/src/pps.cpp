#include "wannflow/pps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wannflow/errors.hpp"
#include "wannflow/rng.hpp"

namespace wannflow {

double pearson_r(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size()) throw DimensionMismatch("pearson_r inputs differ in length");
    const Eigen::Index n = x.size();
    if (n < 2) throw InsufficientRows("pearson_r needs at least 2 values");
    const double mx = x.mean();
    const double my = y.mean();
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw ConstantInput("pearson_r: x has zero variance");
    if (syy == 0.0) throw ConstantInput("pearson_r: y has zero variance");
    return sxy / std::sqrt(sxx * syy);
}

double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& actual) {
    if (pred.size() != actual.size()) throw DimensionMismatch("mae inputs differ in length");
    if (pred.size() == 0) throw InsufficientRows("mae needs at least 1 value");
    return (pred - actual).cwiseAbs().mean();
}

double f_score(double precision, double recall) {
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// ---- depth-limited decision tree on a single feature -----------------------
//
// With one input dimension the tree is a recursive partition of the x axis.
// Regression nodes split on summed squared error and predict the mean;
// classification nodes split on Gini impurity and predict the majority class
// (lowest id on ties).  Splits must strictly reduce impurity.

struct TreeNode {
    bool leaf = true;
    double threshold = 0.0;  // internal: go left when x <= threshold
    int left = -1, right = -1;
    double value = 0.0;  // regression prediction
    int cls = 0;         // classification prediction
};

class SingleFeatureTree {
  public:
    SingleFeatureTree(bool classification, int max_depth, int n_classes)
        : classification_(classification), max_depth_(max_depth), n_classes_(n_classes) {}

    void fit(const std::vector<double>& x, const std::vector<double>& y) {
        // Sort once; nodes operate on index ranges of the sorted order.
        std::vector<std::size_t> order(x.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
        xs_.resize(x.size());
        ys_.resize(x.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            xs_[i] = x[order[i]];
            ys_[i] = y[order[i]];
        }
        nodes_.clear();
        build(0, xs_.size(), 0);
    }

    double predict_value(double x) const { return nodes_[descend(x)].value; }
    int predict_class(double x) const { return nodes_[descend(x)].cls; }

  private:
    std::size_t descend(double x) const {
        std::size_t i = 0;
        while (!nodes_[i].leaf)
            i = x <= nodes_[i].threshold ? static_cast<std::size_t>(nodes_[i].left)
                                         : static_cast<std::size_t>(nodes_[i].right);
        return i;
    }

    // Impurity of [b, e): SSE around the mean, or Gini times the count.
    double impurity(std::size_t b, std::size_t e) const {
        const double n = static_cast<double>(e - b);
        if (classification_) {
            std::vector<double> counts(n_classes_, 0.0);
            for (std::size_t i = b; i < e; ++i) counts[static_cast<std::size_t>(ys_[i])] += 1.0;
            double sq = 0.0;
            for (double c : counts) sq += c * c;
            return n * (1.0 - sq / (n * n));
        }
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t i = b; i < e; ++i) {
            sum += ys_[i];
            sum2 += ys_[i] * ys_[i];
        }
        return sum2 - sum * sum / n;
    }

    void make_leaf(TreeNode& node, std::size_t b, std::size_t e) const {
        node.leaf = true;
        if (classification_) {
            std::vector<std::size_t> counts(n_classes_, 0);
            for (std::size_t i = b; i < e; ++i) ++counts[static_cast<std::size_t>(ys_[i])];
            std::size_t best = 0;
            for (std::size_t c = 1; c < counts.size(); ++c)
                if (counts[c] > counts[best]) best = c;
            node.cls = static_cast<int>(best);
        } else {
            double sum = 0.0;
            for (std::size_t i = b; i < e; ++i) sum += ys_[i];
            node.value = sum / static_cast<double>(e - b);
        }
    }

    int build(std::size_t b, std::size_t e, int depth) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        if (depth >= max_depth_ || e - b < 2) {
            make_leaf(nodes_[id], b, e);
            return id;
        }
        const double parent = impurity(b, e);
        double best_gain = 1e-12;
        std::size_t best_split = 0;  // split between index-1 and index
        for (std::size_t i = b + 1; i < e; ++i) {
            if (xs_[i] == xs_[i - 1]) continue;  // no boundary between equal values
            const double gain = parent - impurity(b, i) - impurity(i, e);
            if (gain > best_gain) {
                best_gain = gain;
                best_split = i;
            }
        }
        if (best_split == 0) {
            make_leaf(nodes_[id], b, e);
            return id;
        }
        nodes_[id].leaf = false;
        nodes_[id].threshold = 0.5 * (xs_[best_split - 1] + xs_[best_split]);
        const int l = build(b, best_split, depth + 1);
        const int r = build(best_split, e, depth + 1);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    bool classification_;
    int max_depth_;
    int n_classes_;
    std::vector<double> xs_, ys_;
    std::vector<TreeNode> nodes_;
};

// Weighted (support-proportional) F1 of predictions against actual classes.
double weighted_f1(const std::vector<int>& actual, const std::vector<int>& pred, int k) {
    const double n = static_cast<double>(actual.size());
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
        double tp = 0.0, fp = 0.0, fn = 0.0;
        for (std::size_t i = 0; i < actual.size(); ++i) {
            const bool a = actual[i] == c;
            const bool p = pred[i] == c;
            if (a && p) tp += 1.0;
            else if (!a && p) fp += 1.0;
            else if (a && !p) fn += 1.0;
        }
        const double support = tp + fn;
        if (support == 0.0) continue;
        const double precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
        const double recall = tp / support;
        total += (support / n) * f_score(precision, recall);
    }
    return total;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int majority_class(const std::vector<int>& v, int k) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int c : v) ++counts[static_cast<std::size_t>(c)];
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best]) best = c;
    return static_cast<int>(best);
}

// Fold boundaries: the first (n % folds) folds take one extra row.
std::vector<std::pair<std::size_t, std::size_t>> fold_ranges(std::size_t n, int folds) {
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    const std::size_t base = n / static_cast<std::size_t>(folds);
    const std::size_t extra = n % static_cast<std::size_t>(folds);
    std::size_t pos = 0;
    for (int f = 0; f < folds; ++f) {
        const std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        ranges.emplace_back(pos, pos + len);
        pos += len;
    }
    return ranges;
}

}  // namespace

PpsResult pps_score(const FlowDataset& dataset, const std::string& feature,
                    const std::string& target, const PpsConfig& config) {
    if (feature == target) throw ConfigError("pps_score: feature and target must differ");
    if (config.folds < 2) throw ConfigError("pps_score: need at least 2 folds");
    const std::size_t n = dataset.size();
    if (n < 2 * static_cast<std::size_t>(config.folds))
        throw InsufficientRows("pps_score needs at least 2 rows per fold");

    const auto& names = dataset.schema.names;
    const auto find_col = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw MissingColumn(name);
        return static_cast<std::size_t>(it - names.begin());
    };

    const std::size_t fcol = find_col(feature);
    const bool classification = target == dataset.schema.label_name;
    const std::size_t tcol = classification ? 0 : find_col(target);
    const int k = dataset.schema.n_classes();

    std::vector<double> x(n), ty(n);
    std::vector<int> cy(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = dataset.records[i].features[static_cast<Eigen::Index>(fcol)];
        if (classification) cy[i] = dataset.records[i].label;
        else ty[i] = dataset.records[i].features[static_cast<Eigen::Index>(tcol)];
    }

    PpsResult result;
    result.feature = feature;
    result.target = target;
    result.task_kind = classification ? TaskKind::classification : TaskKind::regression;

    const bool constant_feature =
        std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });

    Rng rng(derive_seed(config.seed, 0x5050532d4356ull));  // "PPS-CV"
    std::vector<std::size_t> order = random_permutation(n, rng);
    const auto folds = fold_ranges(n, config.folds);

    double model_sum = 0.0, baseline_sum = 0.0;
    for (const auto& [fb, fe] : folds) {
        std::vector<std::size_t> train_idx, test_idx;
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= fb && i < fe) test_idx.push_back(order[i]);
            else train_idx.push_back(order[i]);
        }

        if (classification) {
            std::vector<double> xt;
            std::vector<int> yt;
            std::vector<double> yt_d;
            for (std::size_t i : train_idx) {
                xt.push_back(x[i]);
                yt.push_back(cy[i]);
                yt_d.push_back(static_cast<double>(cy[i]));
            }
            std::vector<int> actual, tree_pred, base_pred;
            const int base_cls = majority_class(yt, k);
            SingleFeatureTree tree(true, config.tree_depth, k);
            if (!constant_feature) tree.fit(xt, yt_d);
            for (std::size_t i : test_idx) {
                actual.push_back(cy[i]);
                tree_pred.push_back(constant_feature ? base_cls : tree.predict_class(x[i]));
                base_pred.push_back(base_cls);
            }
            model_sum += weighted_f1(actual, tree_pred, k);
            baseline_sum += weighted_f1(actual, base_pred, k);
        } else {
            std::vector<double> xt, yt;
            for (std::size_t i : train_idx) {
                xt.push_back(x[i]);
                yt.push_back(ty[i]);
            }
            const double base_value = median_of(yt);
            SingleFeatureTree tree(false, config.tree_depth, k);
            if (!constant_feature) tree.fit(xt, yt);
            Eigen::VectorXd actual(test_idx.size()), tree_pred(test_idx.size()),
                base_pred(test_idx.size());
            for (std::size_t i = 0; i < test_idx.size(); ++i) {
                actual[static_cast<Eigen::Index>(i)] = ty[test_idx[i]];
                tree_pred[static_cast<Eigen::Index>(i)] =
                    constant_feature ? base_value : tree.predict_value(x[test_idx[i]]);
                base_pred[static_cast<Eigen::Index>(i)] = base_value;
            }
            model_sum += mae(tree_pred, actual);
            baseline_sum += mae(base_pred, actual);
        }
    }

    result.model_metric = model_sum / config.folds;
    result.baseline_metric = baseline_sum / config.folds;
    if (constant_feature) result.model_metric = result.baseline_metric;

    if (classification) {
        result.score = result.baseline_metric < 1.0
                           ? clamp01((result.model_metric - result.baseline_metric) /
                                     (1.0 - result.baseline_metric))
                           : 0.0;
    } else {
        result.score = result.baseline_metric > 0.0
                           ? clamp01(1.0 - result.model_metric / result.baseline_metric)
                           : 0.0;
    }
    if (constant_feature) result.score = 0.0;
    return result;
}

std::vector<std::vector<PpsResult>> pps_matrix(const FlowDataset& dataset,
                                               const std::vector<std::string>& targets,
                                               const PpsConfig& config) {
    std::vector<std::vector<PpsResult>> matrix;
    for (std::size_t i = 0; i < dataset.schema.names.size(); ++i) {
        std::vector<PpsResult> row;
        for (std::size_t j = 0; j < targets.size(); ++j) {
            const std::string& feature = dataset.schema.names[i];
            const std::string& target = targets[j];
            if (feature == target) {
                PpsResult diag;
                diag.feature = feature;
                diag.target = target;
                diag.score = 1.0;  // self-prediction convention
                diag.task_kind = TaskKind::regression;
                row.push_back(diag);
                continue;
            }
            PpsConfig cell = config;
            cell.seed = derive_seed(config.seed, i, j);
            row.push_back(pps_score(dataset, feature, target, cell));
        }
        matrix.push_back(std::move(row));
    }
    return matrix;
}

std::vector<std::string> select_features(const std::map<std::string, double>& scores,
                                         double threshold) {
    if (scores.empty()) throw ConfigError("select_features: empty score mapping");
    std::vector<std::pair<std::string, double>> passing;
    for (const auto& [name, score] : scores)
        if (score > threshold) passing.emplace_back(name, score);
    if (passing.empty())
        throw EmptySelection("no feature scored above " + std::to_string(threshold));
    std::sort(passing.begin(), passing.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> names;
    names.reserve(passing.size());
    for (const auto& [name, _] : passing) names.push_back(name);
    return names;
}

}  // namespace wannflow

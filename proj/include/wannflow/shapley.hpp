#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wannflow/csv.hpp"
#include "wannflow/reservoir.hpp"

namespace wannflow {

/// Scalar model output to attribute (e.g. the probability of one category).
using ValueFn = std::function<double(const Eigen::VectorXd&)>;

/// Adapt a trained model to a ValueFn over normalized flow vectors: the
/// softmax probability of the target category.
ValueFn probability_fn(const ReservoirModel& model, int target_category);

/// Representative feature vectors standing in for "absent" feature values.
struct BackgroundSet {
    Eigen::MatrixXd samples;  // n_b x D
    std::string origin;       // provenance note, e.g. "100 training samples, seed 7"
};

struct ShapleyExplanation {
    Eigen::VectorXd instance;
    int target_category = -1;
    std::vector<int> active_features;  // indices the attribution covers
    Eigen::VectorXd phi;               // one value per active feature
    double base_value = 0.0;           // mean model output over the background
    double prediction = 0.0;           // model output at the instance
    std::int64_t n_evaluations = 0;
    std::vector<std::string> feature_names;  // parallel to active_features
};

/// Mean model output over the background with x's values spliced in on the
/// coalition S (marginal-expectation absence semantics).  Features outside
/// active_features stay pinned at x everywhere.
double coalition_value(const ValueFn& model, const Eigen::VectorXd& x, const std::vector<int>& s,
                       const BackgroundSet& background, const std::vector<int>& active_features);

/// Exact Shapley attribution by full 2^M coalition enumeration with weights
/// |S|!(M-|S|-1)!/M!.  M = active feature count, capped at 15.
ShapleyExplanation exact_shapley(const ValueFn& model, const Eigen::VectorXd& x,
                                 const BackgroundSet& background,
                                 const std::vector<int>& active_features);

/// Permutation Monte-Carlo estimator: each sampled feature ordering
/// contributes f(prefix + {i}) - f(prefix) to every feature's running mean.
/// When n_permutations covers all M! orderings (M small), every distinct
/// ordering is enumerated exactly once and the result equals exact_shapley.
ShapleyExplanation sampled_shapley(const ValueFn& model, const Eigen::VectorXd& x,
                                   const BackgroundSet& background, int n_permutations,
                                   std::uint64_t seed);

/// Model-facing wrappers attributing the probability of target_category.
ShapleyExplanation exact_shapley(const ReservoirModel& model, const Eigen::VectorXd& x,
                                 const BackgroundSet& background, int target_category,
                                 const std::vector<int>& active_features);
ShapleyExplanation sampled_shapley(const ReservoirModel& model, const Eigen::VectorXd& x,
                                   const BackgroundSet& background, int target_category,
                                   int n_permutations, std::uint64_t seed);

/// Mean absolute phi per feature over a batch of explanations, sorted
/// descending with name ties broken alphabetically.
std::vector<std::pair<std::string, double>> global_importance(
    const std::vector<ShapleyExplanation>& explanations);

enum class PlotKind { bar, beeswarm, force };

/// Tabular (CSV row) exports backing the three standard attribution plots.
/// bar: (feature, mean_abs_phi); beeswarm: (feature, feature_value, phi) per
/// explanation and feature; force (single explanation): per-feature rows
/// ordered by |phi| descending, carrying base_value and prediction.
std::vector<csv::Row> export_plot_data(const std::vector<ShapleyExplanation>& explanations,
                                       PlotKind kind);

}  // namespace wannflow

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wannflow/dataset.hpp"

namespace wannflow {

enum class TaskKind { regression, classification };

/// Outcome of scoring one feature -> target direction.
/// regression:     score = clamp01(1 - model_metric/baseline_metric)   (MAE, lower better)
/// classification: score = clamp01((model_metric - baseline_metric)/(1 - baseline_metric))
///                 (weighted F1, higher better)
struct PpsResult {
    std::string feature;
    std::string target;
    double score = 0.0;
    TaskKind task_kind = TaskKind::regression;
    double model_metric = 0.0;
    double baseline_metric = 0.0;
};

struct PpsConfig {
    int folds = 4;
    int tree_depth = 4;
    std::uint64_t seed = 0;
};

/// Pearson correlation: covariance over the product of standard deviations.
/// Throws ConstantInput when either vector has zero variance.
double pearson_r(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Mean absolute error between predictions and actuals.
double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& actual);

/// Harmonic mean of precision and recall; 0 when both are 0.
double f_score(double precision, double recall);

/// Predictive power of a single feature for a target, via a depth-limited
/// single-feature decision tree under seeded k-fold cross-validation,
/// normalized against a naive baseline (median predictor for numeric targets,
/// most-frequent-class predictor for the label target).
/// The target is the schema's label column (classification) or another
/// feature column (regression).
PpsResult pps_score(const FlowDataset& dataset, const std::string& feature,
                    const std::string& target, const PpsConfig& config);

/// All features scored against each requested target; element (i, j) is
/// pps_score(feature i -> target j) with per-cell seeds derived from
/// (config.seed, i, j).  Self-prediction cells are 1 by convention.
std::vector<std::vector<PpsResult>> pps_matrix(const FlowDataset& dataset,
                                               const std::vector<std::string>& targets,
                                               const PpsConfig& config);

/// Features scoring strictly above the threshold, ordered by descending score
/// with ties broken by ascending name.  Throws EmptySelection when none pass.
std::vector<std::string> select_features(const std::map<std::string, double>& scores,
                                         double threshold = 0.3);

}  // namespace wannflow

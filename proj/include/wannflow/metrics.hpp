#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace wannflow {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Multiclass evaluation summary.  Scalar metrics use macro averaging; the
/// flag vectors record categories where a 0/0 was coerced to 0 or a class was
/// skipped from the macro AUC for lack of positives/negatives.
struct EvalReport {
    CountMatrix confusion;
    double accuracy = 0.0;
    double auc_macro = 0.0;
    double recall_macro = 0.0;
    double precision_macro = 0.0;
    double f1_macro = 0.0;
    double kappa = 0.0;
    double mcc = 0.0;
    double train_time_s = 0.0;

    std::vector<int> zero_division_classes;  // precision or recall hit 0/0
    std::vector<int> auc_skipped_classes;    // no positives or no negatives

    /// Reliability reading of the kappa statistic (high if kappa >= 0.70).
    std::string reliability_note() const;

    /// Header + single row in the report column order:
    /// classifier,accuracy,auc,recall,precision,f1,kappa,mcc,tt_sec
    static std::vector<std::string> csv_header();
    std::vector<std::string> csv_row(const std::string& classifier_name) const;
};

/// K x K counts; cell (i, j) = records with true label i predicted j.
CountMatrix confusion_matrix(const std::vector<int>& true_labels,
                             const std::vector<int>& predicted_labels, int k);

/// Compute all report metrics from a confusion matrix plus the per-record
/// probability rows used for the macro one-vs-rest AUC (midrank formulation).
/// Each score row must sum to 1 within 1e-6.
EvalReport summary(const CountMatrix& confusion, const Eigen::MatrixXd& scores,
                   const std::vector<int>& true_labels, double train_time_s);

}  // namespace wannflow

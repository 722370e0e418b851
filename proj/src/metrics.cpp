#include "wannflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wannflow/csv.hpp"
#include "wannflow/errors.hpp"

namespace wannflow {

std::string EvalReport::reliability_note() const {
    if (kappa >= 0.70) return "high reliability (kappa >= 0.70)";
    return "kappa below the 0.70 high-reliability bar";
}

std::vector<std::string> EvalReport::csv_header() {
    return {"classifier", "accuracy", "auc", "recall", "precision", "f1", "kappa", "mcc", "tt_sec"};
}

std::vector<std::string> EvalReport::csv_row(const std::string& classifier_name) const {
    return {classifier_name,
            csv::format_double(accuracy),
            csv::format_double(auc_macro),
            csv::format_double(recall_macro),
            csv::format_double(precision_macro),
            csv::format_double(f1_macro),
            csv::format_double(kappa),
            csv::format_double(mcc),
            csv::format_double(train_time_s)};
}

CountMatrix confusion_matrix(const std::vector<int>& true_labels,
                             const std::vector<int>& predicted_labels, int k) {
    if (true_labels.size() != predicted_labels.size())
        throw DimensionMismatch("label vectors differ in length");
    CountMatrix m = CountMatrix::Zero(k, k);
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        const int t = true_labels[i];
        const int p = predicted_labels[i];
        if (t < 0 || t >= k) throw LabelOutOfRange(t, k, i);
        if (p < 0 || p >= k) throw LabelOutOfRange(p, k, i);
        ++m(t, p);
    }
    return m;
}

namespace {

// One-vs-rest AUC for one class column via the rank-sum (midrank) formulation:
// AUC = (R_pos - n_pos(n_pos+1)/2) / (n_pos * n_neg), with tied scores
// receiving the mean of the ranks they span.
double auc_one_vs_rest(const Eigen::VectorXd& col, const std::vector<int>& truth, int cls) {
    const std::size_t n = truth.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });

    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && col[order[j]] == col[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t t = i; t < j; ++t) {
            if (truth[order[t]] == cls) {
                rank_sum_pos += midrank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

}  // namespace

EvalReport summary(const CountMatrix& confusion, const Eigen::MatrixXd& scores,
                   const std::vector<int>& true_labels, double train_time_s) {
    const int k = static_cast<int>(confusion.rows());
    if (confusion.cols() != k) throw DimensionMismatch("confusion matrix is not square");
    if (scores.cols() != k) throw DimensionMismatch("score matrix has wrong class count");
    if (static_cast<std::size_t>(scores.rows()) != true_labels.size())
        throw DimensionMismatch("score rows do not match label count");
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
        if (std::abs(scores.row(r).sum() - 1.0) > 1e-6)
            throw ComputeError("score row " + std::to_string(r) + " does not sum to 1");
    }
    const std::int64_t total = confusion.sum();
    if (total <= 0) throw EmptyDataset("confusion matrix has no counts");

    EvalReport rep;
    rep.confusion = confusion;
    rep.train_time_s = train_time_s;

    const double n = static_cast<double>(total);
    rep.accuracy = static_cast<double>(confusion.trace()) / n;

    double prec_sum = 0.0, rec_sum = 0.0, f1_sum = 0.0;
    for (int c = 0; c < k; ++c) {
        const double tp = static_cast<double>(confusion(c, c));
        const double col = static_cast<double>(confusion.col(c).sum());
        const double row = static_cast<double>(confusion.row(c).sum());
        bool degenerate = false;
        double prec = 0.0, rec = 0.0;
        if (col > 0.0) prec = tp / col;
        else degenerate = true;
        if (row > 0.0) rec = tp / row;
        else degenerate = true;
        if (degenerate) rep.zero_division_classes.push_back(c);
        prec_sum += prec;
        rec_sum += rec;
        f1_sum += (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    }
    rep.precision_macro = prec_sum / k;
    rep.recall_macro = rec_sum / k;
    rep.f1_macro = f1_sum / k;

    // Cohen's kappa with chance agreement from the marginal products.
    double pe = 0.0;
    for (int c = 0; c < k; ++c)
        pe += static_cast<double>(confusion.row(c).sum()) *
              static_cast<double>(confusion.col(c).sum()) / (n * n);
    rep.kappa = (1.0 - pe) > 0.0 ? (rep.accuracy - pe) / (1.0 - pe) : 0.0;

    // Multiclass Matthews correlation from confusion-matrix sums.
    const double c_sum = static_cast<double>(confusion.trace());
    double pt = 0.0, pp2 = 0.0, tt2 = 0.0;
    for (int c = 0; c < k; ++c) {
        const double p = static_cast<double>(confusion.col(c).sum());
        const double t = static_cast<double>(confusion.row(c).sum());
        pt += p * t;
        pp2 += p * p;
        tt2 += t * t;
    }
    const double denom = std::sqrt((n * n - pp2) * (n * n - tt2));
    rep.mcc = denom > 0.0 ? (c_sum * n - pt) / denom : 0.0;

    // Macro one-vs-rest AUC over classes that have both positives and negatives.
    double auc_sum = 0.0;
    int auc_classes = 0;
    for (int c = 0; c < k; ++c) {
        const std::size_t n_pos = static_cast<std::size_t>(
            std::count(true_labels.begin(), true_labels.end(), c));
        if (n_pos == 0 || n_pos == true_labels.size()) {
            rep.auc_skipped_classes.push_back(c);
            continue;
        }
        auc_sum += auc_one_vs_rest(scores.col(c), true_labels, c);
        ++auc_classes;
    }
    rep.auc_macro = auc_classes > 0 ? auc_sum / auc_classes : 0.0;
    return rep;
}

}  // namespace wannflow

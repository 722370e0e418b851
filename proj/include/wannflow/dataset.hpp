#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wannflow {

struct Category {
    int id = 0;
    std::string name;
};

/// Column layout of a flow-feature CSV: feature names, the label column name,
/// and the category id/name table.
struct FeatureSchema {
    std::vector<std::string> names;
    std::string label_name = "Label";
    std::vector<Category> categories;

    std::size_t n_features() const { return names.size(); }
    int n_classes() const { return static_cast<int>(categories.size()); }

    /// Throws ConfigError unless feature names are unique and non-empty and
    /// category ids are exactly 0..K-1.
    void validate() const;

    /// 61 CICFlowMeter-style feature columns and the 11 darknet traffic
    /// categories this project targets by default.
    static FeatureSchema cicdarknet_default();

    /// Anonymous schema for generated data: zero-padded feature names
    /// f00..fNN and categories class_0..class_K-1.
    static FeatureSchema synthetic(std::size_t n_features, int n_classes);
};

struct FlowRecord {
    Eigen::VectorXd features;
    int label = 0;
};

/// Per-feature (mean, std) pairs fitted on a training set.  Constant columns
/// store std 1 so centering maps them to zero without dividing by zero.
struct NormStats {
    std::vector<double> mean;
    std::vector<double> stddev;

    bool empty() const { return mean.empty(); }
};

struct FlowDataset {
    FeatureSchema schema;
    std::vector<FlowRecord> records;
    std::optional<NormStats> norm_stats;

    std::size_t size() const { return records.size(); }

    /// Dense row-per-record feature matrix (n x D).
    Eigen::MatrixXd feature_matrix() const;
    std::vector<int> labels() const;
    /// Count of records per category id (length K).
    std::vector<std::size_t> label_histogram() const;
};

enum class MissingValuePolicy { drop_row, impute_median };

struct LoadReport {
    std::size_t rows_total = 0;    // data rows in the file
    std::size_t rows_kept = 0;
    std::size_t rows_dropped = 0;
    std::size_t cells_imputed = 0;

    std::string to_text() const;
};

/// Parse a header CSV into a dataset.  Columns are matched by header name;
/// extra columns are ignored.  Unparseable or non-finite feature cells are
/// handled per policy; rows with bad labels are always dropped (and counted).
/// The label cell may hold a category id or an exact category name.
FlowDataset load_csv(std::istream& in, const FeatureSchema& schema, MissingValuePolicy policy,
                     LoadReport* report = nullptr);
FlowDataset load_csv(const std::string& path, const FeatureSchema& schema,
                     MissingValuePolicy policy, LoadReport* report = nullptr);

/// Write the dataset back out in the same dialect: feature columns in schema
/// order, then the label column holding integer category ids.
void write_csv(std::ostream& out, const FlowDataset& dataset);
void write_csv(const std::string& path, const FlowDataset& dataset);

/// Fit per-feature z-score statistics (population std; constant columns get
/// std 1) and return the transformed dataset together with the statistics.
std::pair<FlowDataset, NormStats> fit_normalize(const FlowDataset& dataset);

/// Apply previously fitted statistics to a held-out dataset.
FlowDataset apply_normalize(const FlowDataset& dataset, const NormStats& stats);

struct SplitResult {
    FlowDataset train;
    FlowDataset val;
    FlowDataset test;
};

/// Per-category proportional allocation with largest-remainder rounding and a
/// seeded within-category shuffle.  Fractions must be positive and sum to 1;
/// every category needs at least 3 records.
SplitResult stratified_split(const FlowDataset& dataset, const std::array<double, 3>& fractions,
                             std::uint64_t seed);

/// Project the dataset (and any fitted norm stats) onto the named feature
/// columns, in the given order.
FlowDataset subset_features(const FlowDataset& dataset, const std::vector<std::string>& names);

struct SynthSpec {
    std::size_t n_per_class = 100;
    std::size_t n_features = 20;
    std::size_t n_informative = 5;
    int class_count = 3;
    double separation = 10.0;
    std::uint64_t seed = 0;
};

/// Gaussian blobs: each category's center is a seeded standard-normal draw on
/// the informative coordinates scaled by `separation`; every coordinate then
/// gets unit normal noise.  Pure function of the spec.
FlowDataset synth_generate(const SynthSpec& spec);

/// Class centers used by synth_generate, exposed so tests can build
/// nearest-centroid oracles against the generator's ground truth.
Eigen::MatrixXd synth_centers(const SynthSpec& spec);

}  // namespace wannflow

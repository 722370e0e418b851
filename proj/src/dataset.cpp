#include "wannflow/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "wannflow/csv.hpp"
#include "wannflow/errors.hpp"
#include "wannflow/rng.hpp"

namespace wannflow {

void FeatureSchema::validate() const {
    if (names.empty()) throw ConfigError("schema has no feature columns");
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (n.empty()) throw ConfigError("schema contains an empty feature name");
        if (!seen.insert(n).second) throw ConfigError("duplicate feature name: " + n);
    }
    if (label_name.empty()) throw ConfigError("schema label column name is empty");
    if (categories.empty()) throw ConfigError("schema has no categories");
    for (std::size_t i = 0; i < categories.size(); ++i) {
        if (categories[i].id != static_cast<int>(i))
            throw ConfigError("category ids must be exactly 0..K-1 in order; found id " +
                              std::to_string(categories[i].id) + " at position " +
                              std::to_string(i));
    }
}

FeatureSchema FeatureSchema::cicdarknet_default() {
    FeatureSchema s;
    s.names = {
        "Flow_Duration", "Total_Fwd_Packet", "Total_Bwd_Packets",
        "Total_Length_of_Fwd_Packet", "Total_Length_of_Bwd_Packet",
        "Fwd_Packet_Length_Max", "Fwd_Packet_Length_Min", "Fwd_Packet_Length_Mean",
        "Fwd_Packet_Length_Std", "Bwd_Packet_Length_Max", "Bwd_Packet_Length_Min",
        "Bwd_Packet_Length_Mean", "Bwd_Packet_Length_Std", "Flow_Bytes_s",
        "Flow_Packets_s", "Flow_IAT_Mean", "Flow_IAT_Std", "Flow_IAT_Max",
        "Flow_IAT_Min", "Fwd_IAT_Total", "Fwd_IAT_Mean", "Fwd_IAT_Std", "Fwd_IAT_Max",
        "Fwd_IAT_Min", "Bwd_IAT_Total", "Bwd_IAT_Mean", "Bwd_IAT_Std", "Bwd_IAT_Max",
        "Bwd_IAT_Min", "Fwd_PSH_Flags", "Bwd_PSH_Flags", "Fwd_URG_Flags",
        "Bwd_URG_Flags", "Fwd_Header_Length", "Bwd_Header_Length", "Fwd_Packets_s",
        "Bwd_Packets_s", "Packet_Length_Min", "Packet_Length_Max", "Packet_Length_Mean",
        "Packet_Length_Std", "Packet_Length_Variance", "FIN_Flag_Count",
        "SYN_Flag_Count", "RST_Flag_Count", "PSH_Flag_Count", "ACK_Flag_Count",
        "URG_Flag_Count", "Down_Up_Ratio", "Average_Packet_Size",
        "Fwd_Segment_Size_Avg", "Bwd_Segment_Size_Avg", "Subflow_Fwd_Packets",
        "Subflow_Fwd_Bytes", "Subflow_Bwd_Packets", "Subflow_Bwd_Bytes",
        "FWD_Init_Win_Bytes", "Bwd_Init_Win_Bytes", "Idle_Mean", "Idle_Max", "Idle_Min",
    };
    s.label_name = "Label";
    s.categories = {
        {0, "Audio-Stream"}, {1, "Audio-Stream"}, {2, "Browsing"},   {3, "Chat"},
        {4, "Email"},        {5, "P2P"},          {6, "File Transfer"},
        {7, "File Transfer"}, {8, "Video-Stream"}, {9, "Video-Stream"}, {10, "VOIP"},
    };
    s.validate();
    return s;
}

FeatureSchema FeatureSchema::synthetic(std::size_t n_features, int n_classes) {
    FeatureSchema s;
    int width = 1;
    for (std::size_t v = n_features > 0 ? n_features - 1 : 0; v >= 10; v /= 10) ++width;
    for (std::size_t i = 0; i < n_features; ++i) {
        std::string num = std::to_string(i);
        s.names.push_back("f" + std::string(width - num.size(), '0') + num);
    }
    s.label_name = "label";
    for (int c = 0; c < n_classes; ++c) s.categories.push_back({c, "class_" + std::to_string(c)});
    s.validate();
    return s;
}

Eigen::MatrixXd FlowDataset::feature_matrix() const {
    Eigen::MatrixXd X(records.size(), schema.n_features());
    for (std::size_t i = 0; i < records.size(); ++i) X.row(i) = records[i].features.transpose();
    return X;
}

std::vector<int> FlowDataset::labels() const {
    std::vector<int> y(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) y[i] = records[i].label;
    return y;
}

std::vector<std::size_t> FlowDataset::label_histogram() const {
    std::vector<std::size_t> h(schema.categories.size(), 0);
    for (const auto& r : records) ++h[static_cast<std::size_t>(r.label)];
    return h;
}

std::string LoadReport::to_text() const {
    std::ostringstream os;
    os << "rows_total=" << rows_total << " rows_kept=" << rows_kept
       << " rows_dropped=" << rows_dropped << " cells_imputed=" << cells_imputed;
    return os.str();
}

namespace {

// A feature cell is usable only if it parses as a finite number.
bool parse_feature_cell(const std::string& cell, double& out) {
    try {
        out = csv::parse_double(cell, "");
    } catch (const DataError&) {
        return false;
    }
    return std::isfinite(out);
}

double column_median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

FlowDataset load_csv(std::istream& in, const FeatureSchema& schema, MissingValuePolicy policy,
                     LoadReport* report) {
    schema.validate();
    const auto rows = csv::read(in);
    if (rows.empty()) throw EmptyDataset("file has no header row");
    const csv::Row& header = rows.front();

    std::unordered_map<std::string, std::size_t> col_index;
    for (std::size_t i = 0; i < header.size(); ++i) col_index.emplace(header[i], i);

    std::vector<std::size_t> feature_cols;
    for (const auto& name : schema.names) {
        auto it = col_index.find(name);
        if (it == col_index.end()) throw MissingColumn(name);
        feature_cols.push_back(it->second);
    }
    auto label_it = col_index.find(schema.label_name);
    if (label_it == col_index.end()) throw MissingColumn(schema.label_name);
    const std::size_t label_col = label_it->second;
    const std::size_t max_col =
        std::max(label_col, *std::max_element(feature_cols.begin(), feature_cols.end()));

    std::unordered_map<std::string, int> name_to_id;  // first id wins on duplicate names
    for (const auto& c : schema.categories) name_to_id.emplace(c.name, c.id);
    const int k = schema.n_classes();

    const std::size_t d = schema.n_features();
    LoadReport rep;
    // Parsed rows with per-cell validity; invalid cells become NaN placeholders
    // until the policy resolves them.
    std::vector<Eigen::VectorXd> features;
    std::vector<int> labels;
    std::vector<std::vector<std::size_t>> bad_cells;  // row -> bad feature indices

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const csv::Row& row = rows[r];
        ++rep.rows_total;
        if (row.size() <= max_col) {  // short row: nothing sensible to impute
            ++rep.rows_dropped;
            continue;
        }
        const std::string& label_cell = row[label_col];
        int label = -1;
        bool label_ok = false;
        try {
            const long long v = csv::parse_int(label_cell, "");
            if (v < 0 || v >= k) throw LabelOutOfRange(v, k, r);
            label = static_cast<int>(v);
            label_ok = true;
        } catch (const LabelOutOfRange&) {
            throw;
        } catch (const DataError&) {
            auto it = name_to_id.find(label_cell);
            if (it != name_to_id.end()) {
                label = it->second;
                label_ok = true;
            }
        }
        if (!label_ok) {
            ++rep.rows_dropped;
            continue;
        }

        Eigen::VectorXd vec(d);
        std::vector<std::size_t> bad;
        for (std::size_t j = 0; j < d; ++j) {
            double v;
            if (parse_feature_cell(row[feature_cols[j]], v)) {
                vec[j] = v;
            } else {
                vec[j] = 0.0;
                bad.push_back(j);
            }
        }
        if (!bad.empty() && policy == MissingValuePolicy::drop_row) {
            ++rep.rows_dropped;
            continue;
        }
        features.push_back(std::move(vec));
        labels.push_back(label);
        bad_cells.push_back(std::move(bad));
    }

    if (policy == MissingValuePolicy::impute_median) {
        // Column medians over valid cells only.
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> valid;
            for (std::size_t i = 0; i < features.size(); ++i) {
                if (std::find(bad_cells[i].begin(), bad_cells[i].end(), j) == bad_cells[i].end())
                    valid.push_back(features[i][j]);
            }
            if (valid.empty()) continue;  // entire column invalid: cells stay 0
            const double med = column_median(std::move(valid));
            for (std::size_t i = 0; i < features.size(); ++i) {
                if (std::find(bad_cells[i].begin(), bad_cells[i].end(), j) != bad_cells[i].end()) {
                    features[i][j] = med;
                    ++rep.cells_imputed;
                }
            }
        }
    }

    FlowDataset ds;
    ds.schema = schema;
    for (std::size_t i = 0; i < features.size(); ++i)
        ds.records.push_back({std::move(features[i]), labels[i]});
    rep.rows_kept = ds.records.size();
    if (report) *report = rep;
    if (ds.records.empty()) throw EmptyDataset("no valid rows after applying the missing-value policy");
    return ds;
}

FlowDataset load_csv(const std::string& path, const FeatureSchema& schema,
                     MissingValuePolicy policy, LoadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    return load_csv(in, schema, policy, report);
}

void write_csv(std::ostream& out, const FlowDataset& dataset) {
    std::vector<csv::Row> rows;
    csv::Row header = dataset.schema.names;
    header.push_back(dataset.schema.label_name);
    rows.push_back(std::move(header));
    for (const auto& rec : dataset.records) {
        csv::Row row;
        row.reserve(dataset.schema.n_features() + 1);
        for (Eigen::Index j = 0; j < rec.features.size(); ++j)
            row.push_back(csv::format_double(rec.features[j]));
        row.push_back(std::to_string(rec.label));
        rows.push_back(std::move(row));
    }
    csv::write(out, rows);
}

void write_csv(const std::string& path, const FlowDataset& dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open file for writing: " + path);
    write_csv(out, dataset);
}

std::pair<FlowDataset, NormStats> fit_normalize(const FlowDataset& dataset) {
    if (dataset.records.empty()) throw EmptyDataset("fit_normalize");
    const std::size_t d = dataset.schema.n_features();
    const double n = static_cast<double>(dataset.records.size());
    NormStats stats;
    stats.mean.resize(d);
    stats.stddev.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (const auto& r : dataset.records) sum += r.features[j];
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& r : dataset.records) {
            const double dlt = r.features[j] - mean;
            ss += dlt * dlt;
        }
        const double var = ss / n;  // population convention
        stats.mean[j] = mean;
        stats.stddev[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return {apply_normalize(dataset, stats), stats};
}

FlowDataset apply_normalize(const FlowDataset& dataset, const NormStats& stats) {
    const std::size_t d = dataset.schema.n_features();
    if (stats.mean.size() != d || stats.stddev.size() != d)
        throw DimensionMismatch("norm stats cover " + std::to_string(stats.mean.size()) +
                                " features, dataset has " + std::to_string(d));
    FlowDataset out;
    out.schema = dataset.schema;
    out.norm_stats = stats;
    out.records.reserve(dataset.records.size());
    for (const auto& r : dataset.records) {
        FlowRecord nr;
        nr.label = r.label;
        nr.features.resize(r.features.size());
        for (std::size_t j = 0; j < d; ++j)
            nr.features[j] = (r.features[j] - stats.mean[j]) / stats.stddev[j];
        out.records.push_back(std::move(nr));
    }
    return out;
}

SplitResult stratified_split(const FlowDataset& dataset, const std::array<double, 3>& fractions,
                             std::uint64_t seed) {
    double total = 0.0;
    for (double f : fractions) {
        if (f <= 0.0) throw ConfigError("split fractions must be positive");
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");

    const int k = dataset.schema.n_classes();
    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < dataset.records.size(); ++i)
        by_class[static_cast<std::size_t>(dataset.records[i].label)].push_back(i);
    for (int c = 0; c < k; ++c)
        if (!by_class[c].empty() && by_class[c].size() < 3)
            throw CategoryTooSmall(c, by_class[c].size());

    Rng rng(derive_seed(seed, 0x53504c49545full));  // "SPLIT_"
    SplitResult result;
    result.train.schema = result.val.schema = result.test.schema = dataset.schema;
    result.train.norm_stats = result.val.norm_stats = result.test.norm_stats = dataset.norm_stats;

    for (int c = 0; c < k; ++c) {
        auto& idx = by_class[c];
        if (idx.empty()) continue;
        rng.shuffle(idx);
        const double n = static_cast<double>(idx.size());
        std::array<std::size_t, 3> counts{};
        std::array<double, 3> remainder{};
        std::size_t assigned = 0;
        for (int s = 0; s < 3; ++s) {
            const double quota = n * fractions[static_cast<std::size_t>(s)];
            counts[s] = static_cast<std::size_t>(std::floor(quota));
            remainder[s] = quota - std::floor(quota);
            assigned += counts[s];
        }
        // Largest remainder takes the leftover rows; ties go to the earlier split.
        std::array<int, 3> order{0, 1, 2};
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return remainder[a] > remainder[b]; });
        for (std::size_t left = idx.size() - assigned, s = 0; left > 0; --left, ++s)
            ++counts[static_cast<std::size_t>(order[s % 3])];

        std::size_t pos = 0;
        FlowDataset* parts[3] = {&result.train, &result.val, &result.test};
        for (int s = 0; s < 3; ++s) {
            for (std::size_t i = 0; i < counts[s]; ++i, ++pos)
                parts[s]->records.push_back(dataset.records[idx[pos]]);
        }
    }
    return result;
}

FlowDataset subset_features(const FlowDataset& dataset, const std::vector<std::string>& names) {
    if (names.empty()) throw EmptySelection("subset_features got no feature names");
    std::vector<std::size_t> cols;
    for (const auto& name : names) {
        const auto it =
            std::find(dataset.schema.names.begin(), dataset.schema.names.end(), name);
        if (it == dataset.schema.names.end()) throw MissingColumn(name);
        cols.push_back(static_cast<std::size_t>(it - dataset.schema.names.begin()));
    }
    FlowDataset out;
    out.schema = dataset.schema;
    out.schema.names = names;
    out.schema.validate();
    if (dataset.norm_stats) {
        NormStats stats;
        for (std::size_t c : cols) {
            stats.mean.push_back(dataset.norm_stats->mean[c]);
            stats.stddev.push_back(dataset.norm_stats->stddev[c]);
        }
        out.norm_stats = std::move(stats);
    }
    out.records.reserve(dataset.records.size());
    for (const auto& rec : dataset.records) {
        FlowRecord nr;
        nr.label = rec.label;
        nr.features.resize(static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i)
            nr.features[static_cast<Eigen::Index>(i)] =
                rec.features[static_cast<Eigen::Index>(cols[i])];
        out.records.push_back(std::move(nr));
    }
    return out;
}

Eigen::MatrixXd synth_centers(const SynthSpec& spec) {
    if (spec.n_informative > spec.n_features)
        throw ConfigError("n_informative exceeds n_features");
    if (spec.class_count < 2) throw ConfigError("class_count must be at least 2");
    Rng rng(derive_seed(spec.seed, 0x43454e54455253ull));  // "CENTERS"
    Eigen::MatrixXd centers =
        Eigen::MatrixXd::Zero(spec.class_count, static_cast<Eigen::Index>(spec.n_features));
    for (int c = 0; c < spec.class_count; ++c)
        for (std::size_t j = 0; j < spec.n_informative; ++j)
            centers(c, static_cast<Eigen::Index>(j)) = spec.separation * rng.normal();
    return centers;
}

FlowDataset synth_generate(const SynthSpec& spec) {
    const Eigen::MatrixXd centers = synth_centers(spec);
    FlowDataset ds;
    ds.schema = FeatureSchema::synthetic(spec.n_features, spec.class_count);
    Rng rng(derive_seed(spec.seed, 0x504f494e5453ull));  // "POINTS"
    for (int c = 0; c < spec.class_count; ++c) {
        for (std::size_t i = 0; i < spec.n_per_class; ++i) {
            FlowRecord rec;
            rec.label = c;
            rec.features.resize(static_cast<Eigen::Index>(spec.n_features));
            for (std::size_t j = 0; j < spec.n_features; ++j)
                rec.features[static_cast<Eigen::Index>(j)] =
                    centers(c, static_cast<Eigen::Index>(j)) + rng.normal();
            ds.records.push_back(std::move(rec));
        }
    }
    return ds;
}

}  // namespace wannflow

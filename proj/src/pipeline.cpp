#include "wannflow/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "wannflow/csv.hpp"
#include "wannflow/errors.hpp"
#include "wannflow/metrics.hpp"
#include "wannflow/rng.hpp"
#include "wannflow/serialize.hpp"
#include "wannflow/shapley.hpp"

namespace wannflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Role tags separating the random streams of a run.
constexpr std::uint64_t role_synth = 0x53594e5448ull;    // "SYNTH"
constexpr std::uint64_t role_split = 0x53504c4954ull;    // "SPLIT"
constexpr std::uint64_t role_pps = 0x505053ull;          // "PPS"
constexpr std::uint64_t role_genome = 0x47454e4f4dull;   // "GENOM"
constexpr std::uint64_t role_search = 0x535243ull;       // "SRC"
constexpr std::uint64_t role_shap = 0x53484150ull;       // "SHAP"
constexpr std::uint64_t role_background = 0x4247ull;     // "BG"

void check_keys(const json& j, const std::string& section,
                const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key))
            throw ConfigError("unknown config key '" + key + "' in section '" + section + "'");
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

std::string artifact(const RunConfig& config, const std::string& name) {
    return (fs::path(config.out_dir) / name).string();
}

// Atomicity plus the explicit-overwrite contract for every artifact write.
void guard_outputs(const RunConfig& config, const std::vector<std::string>& names) {
    if (config.overwrite) return;
    for (const auto& name : names) {
        const std::string path = artifact(config, name);
        if (fs::exists(path)) throw OutputExists(path);
    }
}

std::string rows_to_text(const std::vector<csv::Row>& rows) {
    std::ostringstream os;
    csv::write(os, rows);
    return os.str();
}

void write_rows(const RunConfig& config, const std::string& name,
                const std::vector<csv::Row>& rows) {
    write_text_atomic(artifact(config, name), rows_to_text(rows));
}

void write_dataset(const RunConfig& config, const std::string& name, const FlowDataset& ds) {
    std::ostringstream os;
    write_csv(os, ds);
    write_text_atomic(artifact(config, name), os.str());
}

void note(const RunConfig& config, const std::string& message) {
    if (!config.quiet) std::fprintf(stdout, "%s\n", message.c_str());
}

FeatureSchema load_schema_artifact(const RunConfig& config) {
    return schema_from_json(load_json(artifact(config, "schema.json")));
}

NormStats load_norm_stats(const RunConfig& config, const FeatureSchema& schema) {
    const auto rows = csv::read_file(artifact(config, "norm_stats.csv"));
    if (rows.size() < 2 || rows.front() != csv::Row{"feature", "mean", "stddev"})
        throw DataError("norm_stats.csv is malformed");
    std::map<std::string, std::pair<double, double>> by_name;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 3) throw DataError("norm_stats.csv row has wrong arity");
        by_name[rows[i][0]] = {csv::parse_double(rows[i][1], "norm_stats mean"),
                               csv::parse_double(rows[i][2], "norm_stats stddev")};
    }
    NormStats stats;
    for (const auto& name : schema.names) {
        const auto it = by_name.find(name);
        if (it == by_name.end()) throw MissingColumn(name);
        stats.mean.push_back(it->second.first);
        stats.stddev.push_back(it->second.second);
    }
    return stats;
}

std::vector<std::string> read_selected_features(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) names.push_back(line);
    }
    if (names.empty()) throw DataError("selected features file is empty: " + path);
    return names;
}

// Train/val/test split artifact, with norm stats attached and (optionally)
// projected onto the pps-selected features.
FlowDataset load_split(const RunConfig& config, const std::string& name, bool apply_selection) {
    const FeatureSchema schema = load_schema_artifact(config);
    FlowDataset ds = load_csv(artifact(config, name), schema, MissingValuePolicy::drop_row);
    ds.norm_stats = load_norm_stats(config, schema);
    const std::string selected_path = artifact(config, "selected_features.txt");
    if (apply_selection && config.use_selected_features && fs::exists(selected_path))
        ds = subset_features(ds, read_selected_features(selected_path));
    return ds;
}

ReservoirGenome resolve_genome(const RunConfig& config) {
    if (!config.genome_file.empty()) return load_genome(config.genome_file);
    return ReservoirGenome::parse_notation(config.genome_notation,
                                           derive_seed(config.seed, role_genome));
}

std::vector<csv::Row> confusion_rows(const CountMatrix& confusion) {
    std::vector<csv::Row> rows;
    csv::Row header{"true"};
    for (Eigen::Index c = 0; c < confusion.cols(); ++c)
        header.push_back("pred_" + std::to_string(c));
    rows.push_back(std::move(header));
    for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
        csv::Row row{std::to_string(r)};
        for (Eigen::Index c = 0; c < confusion.cols(); ++c)
            row.push_back(std::to_string(confusion(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

EvalReport evaluate_model(const ReservoirModel& model, const FlowDataset& test,
                          double train_time_s) {
    std::vector<int> truth = test.labels();
    std::vector<int> predicted;
    Eigen::MatrixXd scores(test.size(), model.schema.n_classes());
    for (std::size_t i = 0; i < test.size(); ++i) {
        const Prediction p = predict_normalized(model, test.records[i].features);
        predicted.push_back(p.category);
        scores.row(static_cast<Eigen::Index>(i)) = p.probabilities;
    }
    const CountMatrix confusion =
        confusion_matrix(truth, predicted, model.schema.n_classes());
    return summary(confusion, scores, truth, train_time_s);
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
    check_keys(j, "(top level)",
               {"seed", "out_dir", "overwrite", "quiet", "data", "pps", "train", "search",
                "shapley"});
    RunConfig c;
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    c.out_dir = get_or<std::string>(j, "out_dir", "out");
    c.overwrite = get_or<bool>(j, "overwrite", false);
    c.quiet = get_or<bool>(j, "quiet", false);

    if (j.contains("data")) {
        const json& d = j.at("data");
        check_keys(d, "data",
                   {"csv", "schema", "schema_file", "missing_policy", "split_fractions",
                    "synth"});
        c.data_csv = get_or<std::string>(d, "csv", "");
        c.schema_kind = get_or<std::string>(d, "schema", "cicdarknet");
        c.schema_file = get_or<std::string>(d, "schema_file", "");
        const std::string policy = get_or<std::string>(d, "missing_policy", "drop_row");
        if (policy == "drop_row") c.missing_policy = MissingValuePolicy::drop_row;
        else if (policy == "impute_median") c.missing_policy = MissingValuePolicy::impute_median;
        else throw ConfigError("unknown missing_policy: " + policy);
        if (d.contains("split_fractions")) {
            const auto f = d.at("split_fractions").get<std::vector<double>>();
            if (f.size() != 3) throw ConfigError("split_fractions needs exactly 3 values");
            c.split_fractions = {f[0], f[1], f[2]};
        }
        if (d.contains("synth")) {
            const json& s = d.at("synth");
            check_keys(s, "data.synth",
                       {"n_per_class", "n_features", "n_informative", "class_count",
                        "separation"});
            c.synth.n_per_class = get_or<std::size_t>(s, "n_per_class", c.synth.n_per_class);
            c.synth.n_features = get_or<std::size_t>(s, "n_features", c.synth.n_features);
            c.synth.n_informative =
                get_or<std::size_t>(s, "n_informative", c.synth.n_informative);
            c.synth.class_count = get_or<int>(s, "class_count", c.synth.class_count);
            c.synth.separation = get_or<double>(s, "separation", c.synth.separation);
        }
    }

    if (j.contains("pps")) {
        const json& p = j.at("pps");
        check_keys(p, "pps", {"threshold", "folds", "tree_depth"});
        c.pps_threshold = get_or<double>(p, "threshold", 0.3);
        c.pps_folds = get_or<int>(p, "folds", 4);
        c.pps_tree_depth = get_or<int>(p, "tree_depth", 4);
    }

    if (j.contains("train")) {
        const json& t = j.at("train");
        check_keys(t, "train",
                   {"genome", "genome_file", "encode_mode", "encode_steps", "ridge_c",
                    "readout", "use_selected_features", "timing"});
        c.genome_notation = get_or<std::string>(t, "genome", c.genome_notation);
        c.genome_file = get_or<std::string>(t, "genome_file", "");
        c.encode_mode =
            encode_mode_from_name(get_or<std::string>(t, "encode_mode", "single_shot"));
        c.encode_steps = get_or<int>(t, "encode_steps", 10);
        c.ridge_c = get_or<double>(t, "ridge_c", 1.0);
        const std::string readout = get_or<std::string>(t, "readout", "ridge");
        if (readout == "ridge") c.readout_mode = ReadoutMode::ridge;
        else if (readout == "pseudoinverse") c.readout_mode = ReadoutMode::pseudoinverse;
        else throw ConfigError("unknown readout mode: " + readout);
        c.use_selected_features = get_or<bool>(t, "use_selected_features", true);
        const std::string timing = get_or<std::string>(t, "timing", "wall_clock");
        if (timing == "wall_clock") c.fixed_zero_timing = false;
        else if (timing == "fixed_zero") c.fixed_zero_timing = true;
        else throw ConfigError("unknown timing mode: " + timing);
    }

    if (j.contains("search")) {
        const json& s = j.at("search");
        check_keys(s, "search",
                   {"population_size", "generations", "shared_weights", "eval_mode",
                    "elitism_count", "mutation_rates", "min_layers", "max_layers",
                    "min_layer_size", "max_layer_size", "ridge_c", "encode_mode",
                    "encode_steps"});
        c.search.population_size = get_or<int>(s, "population_size", c.search.population_size);
        c.search.generations = get_or<int>(s, "generations", c.search.generations);
        if (s.contains("shared_weights"))
            c.search.shared_weight_values = s.at("shared_weights").get<std::vector<double>>();
        const std::string mode = get_or<std::string>(s, "eval_mode", "agnostic");
        if (mode == "agnostic") c.search.eval_mode = EvalMode::agnostic;
        else if (mode == "readout_trained") c.search.eval_mode = EvalMode::readout_trained;
        else throw ConfigError("unknown eval_mode: " + mode);
        c.search.elitism_count = get_or<int>(s, "elitism_count", c.search.elitism_count);
        if (s.contains("mutation_rates")) {
            const json& r = s.at("mutation_rates");
            check_keys(r, "search.mutation_rates",
                       {"insert_node", "add_connection", "change_activation"});
            c.search.mutation_rates.insert_node = get_or<double>(r, "insert_node", 0.0);
            c.search.mutation_rates.add_connection = get_or<double>(r, "add_connection", 0.0);
            c.search.mutation_rates.change_activation =
                get_or<double>(r, "change_activation", 0.0);
        }
        c.search.min_layers = get_or<int>(s, "min_layers", c.search.min_layers);
        c.search.max_layers = get_or<int>(s, "max_layers", c.search.max_layers);
        c.search.min_layer_size = get_or<int>(s, "min_layer_size", c.search.min_layer_size);
        c.search.max_layer_size = get_or<int>(s, "max_layer_size", c.search.max_layer_size);
        c.search.ridge_c = get_or<double>(s, "ridge_c", c.search.ridge_c);
        c.search.encode_mode =
            encode_mode_from_name(get_or<std::string>(s, "encode_mode", "single_shot"));
        c.search.encode_steps = get_or<int>(s, "encode_steps", c.search.encode_steps);
    }

    if (j.contains("shapley")) {
        const json& s = j.at("shapley");
        check_keys(s, "shapley", {"background_size", "permutations", "rows", "exact"});
        c.shap_background = get_or<int>(s, "background_size", 100);
        c.shap_permutations = get_or<int>(s, "permutations", 50);
        c.shap_rows = get_or<int>(s, "rows", 5);
        c.shap_exact = get_or<bool>(s, "exact", false);
    }

    c.validate();
    return c;
}

void RunConfig::validate() const {
    if (out_dir.empty()) throw ConfigError("out_dir is empty");
    if (schema_kind != "cicdarknet" && schema_kind != "synthetic" && schema_kind != "file")
        throw ConfigError("unknown schema kind: " + schema_kind);
    if (schema_kind == "file" && schema_file.empty())
        throw ConfigError("schema kind 'file' requires schema_file");
    for (double f : split_fractions)
        if (f <= 0.0) throw ConfigError("split fractions must be positive");
    if (!(pps_threshold >= 0.0 && pps_threshold < 1.0))
        throw ConfigError("pps threshold must lie in [0, 1)");
    if (pps_folds < 2) throw ConfigError("pps folds must be at least 2");
    if (pps_tree_depth < 1) throw ConfigError("pps tree depth must be at least 1");
    if (encode_steps < 1) throw ConfigError("encode_steps must be at least 1");
    if (!(ridge_c > 0.0)) throw ConfigError("ridge_c must be positive");
    if (shap_background < 1) throw ConfigError("shapley background_size must be at least 1");
    if (shap_permutations < 1) throw ConfigError("shapley permutations must be at least 1");
    if (shap_rows < 1) throw ConfigError("shapley rows must be at least 1");
    search.validate();
}

RunConfig load_run_config(const std::string& path) {
    json j;
    try {
        j = load_json(path);
    } catch (const DataError& e) {
        // A bad config file is a usage error, not a data error.
        throw ConfigError(e.what());
    }
    return RunConfig::from_json(j);
}

FeatureSchema resolve_schema(const RunConfig& config) {
    if (config.schema_kind == "cicdarknet") return FeatureSchema::cicdarknet_default();
    if (config.schema_kind == "synthetic")
        return FeatureSchema::synthetic(config.synth.n_features, config.synth.class_count);
    return schema_from_json(load_json(config.schema_file));
}

void cmd_ingest(const RunConfig& config) {
    guard_outputs(config, {"train.csv", "val.csv", "test.csv", "norm_stats.csv", "schema.json",
                           "load_report.txt"});
    FlowDataset dataset;
    LoadReport report;
    if (config.data_csv.empty()) {
        SynthSpec spec = config.synth;
        spec.seed = derive_seed(config.seed, role_synth);
        dataset = synth_generate(spec);
        report.rows_total = report.rows_kept = dataset.size();
    } else {
        dataset = load_csv(config.data_csv, resolve_schema(config), config.missing_policy,
                           &report);
    }

    auto [normalized, stats] = fit_normalize(dataset);
    const SplitResult splits =
        stratified_split(normalized, config.split_fractions, derive_seed(config.seed, role_split));

    write_dataset(config, "train.csv", splits.train);
    write_dataset(config, "val.csv", splits.val);
    write_dataset(config, "test.csv", splits.test);

    std::vector<csv::Row> stat_rows{{"feature", "mean", "stddev"}};
    for (std::size_t i = 0; i < stats.mean.size(); ++i)
        stat_rows.push_back({dataset.schema.names[i], csv::format_double(stats.mean[i]),
                             csv::format_double(stats.stddev[i])});
    write_rows(config, "norm_stats.csv", stat_rows);
    write_text_atomic(artifact(config, "schema.json"),
                      schema_to_json(dataset.schema).dump(2) + "\n");
    write_text_atomic(artifact(config, "load_report.txt"), report.to_text() + "\n");
    note(config, "ingest: " + report.to_text() + " -> train=" + std::to_string(splits.train.size()) +
                     " val=" + std::to_string(splits.val.size()) +
                     " test=" + std::to_string(splits.test.size()));
}

void cmd_pps(const RunConfig& config) {
    guard_outputs(config, {"pps_matrix.csv", "selected_features.txt"});
    const FeatureSchema schema = load_schema_artifact(config);
    const FlowDataset train =
        load_csv(artifact(config, "train.csv"), schema, MissingValuePolicy::drop_row);

    PpsConfig pps_config;
    pps_config.folds = config.pps_folds;
    pps_config.tree_depth = config.pps_tree_depth;
    pps_config.seed = derive_seed(config.seed, role_pps);
    const std::vector<std::string> targets{schema.label_name};
    const auto matrix = pps_matrix(train, targets, pps_config);

    std::vector<csv::Row> rows{{"feature", schema.label_name}};
    std::map<std::string, double> label_scores;
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        const PpsResult& cell = matrix[i][0];
        rows.push_back({cell.feature, csv::format_double(cell.score)});
        label_scores[cell.feature] = cell.score;
    }
    const std::vector<std::string> selected = select_features(label_scores, config.pps_threshold);

    write_rows(config, "pps_matrix.csv", rows);
    std::string list;
    for (const auto& name : selected) list += name + "\n";
    write_text_atomic(artifact(config, "selected_features.txt"), list);
    note(config, "pps: selected " + std::to_string(selected.size()) + " of " +
                     std::to_string(schema.names.size()) + " features");
}

void cmd_train(const RunConfig& config) {
    guard_outputs(config, {"model.json", "report.csv", "confusion.csv"});
    const FlowDataset train = load_split(config, "train.csv", true);
    const FlowDataset test = load_split(config, "test.csv", true);

    ReservoirModel model = build_model(resolve_genome(config), train.schema, config.encode_mode,
                                       config.encode_steps);
    const auto t0 = std::chrono::steady_clock::now();
    train_readout(model, train, config.ridge_c, config.readout_mode);
    const auto t1 = std::chrono::steady_clock::now();
    const double tt =
        config.fixed_zero_timing ? 0.0 : std::chrono::duration<double>(t1 - t0).count();

    const EvalReport report = evaluate_model(model, test, tt);
    save_model(artifact(config, "model.json"), model);
    write_rows(config, "report.csv",
               {EvalReport::csv_header(),
                report.csv_row("Reservoir " + model.genome.notation())});
    write_rows(config, "confusion.csv", confusion_rows(report.confusion));
    note(config, "train: accuracy=" + csv::format_double(report.accuracy) +
                     " kappa=" + csv::format_double(report.kappa) + " (" +
                     report.reliability_note() + ")");
}

void cmd_search(const RunConfig& config) {
    guard_outputs(config, {"search_history.csv", "best_genome.json", "population.csv"});
    const FlowDataset train = load_split(config, "train.csv", true);
    const FlowDataset val = load_split(config, "val.csv", true);

    SearchConfig search_config = config.search;
    search_config.seed = derive_seed(config.seed, role_search);
    const SearchResult result = run_search(train, val, search_config);

    std::vector<csv::Row> history{{"generation", "best_fitness", "mean_fitness",
                                   "best_complexity"}};
    for (const auto& g : result.history)
        history.push_back({std::to_string(g.generation), csv::format_double(g.best_fitness),
                           csv::format_double(g.mean_fitness),
                           std::to_string(g.best_complexity)});
    write_rows(config, "search_history.csv", history);
    save_genome(artifact(config, "best_genome.json"), result.best.genome);

    std::vector<csv::Row> population{{"rank", "front", "generation", "genome", "fitness_mean",
                                      "fitness_min", "complexity", "seed"}};
    for (const auto& e : result.final_population)
        population.push_back({std::to_string(e.rank), std::to_string(e.front),
                              std::to_string(e.generation), e.genome.notation(),
                              csv::format_double(e.fitness_mean),
                              csv::format_double(e.fitness_min), std::to_string(e.complexity),
                              std::to_string(e.genome.seed)});
    write_rows(config, "population.csv", population);
    note(config, "search: best " + result.best.genome.notation() + " fitness_mean=" +
                     csv::format_double(result.best.fitness_mean));
}

void cmd_explain(const RunConfig& config) {
    guard_outputs(config,
                  {"shap_bar.csv", "shap_beeswarm.csv", "shap_force.csv", "shap_manifest.txt"});
    const ReservoirModel model = load_model(artifact(config, "model.json"));
    const FeatureSchema schema = load_schema_artifact(config);
    FlowDataset train = load_csv(artifact(config, "train.csv"), schema,
                                 MissingValuePolicy::drop_row);
    FlowDataset test = load_csv(artifact(config, "test.csv"), schema,
                                MissingValuePolicy::drop_row);
    // Project the splits onto whatever features the model was trained with.
    train = subset_features(train, model.schema.names);
    test = subset_features(test, model.schema.names);

    // Background: a seeded sample of training rows.
    const std::size_t n_background =
        std::min<std::size_t>(static_cast<std::size_t>(config.shap_background), train.size());
    Rng background_rng(derive_seed(config.seed, role_background));
    std::vector<std::size_t> order = random_permutation(train.size(), background_rng);
    BackgroundSet background;
    background.samples.resize(static_cast<Eigen::Index>(n_background),
                              static_cast<Eigen::Index>(model.schema.n_features()));
    for (std::size_t i = 0; i < n_background; ++i)
        background.samples.row(static_cast<Eigen::Index>(i)) =
            train.records[order[i]].features.transpose();
    background.origin = std::to_string(n_background) + " training samples, seed " +
                        std::to_string(config.seed);

    const std::size_t n_rows =
        std::min<std::size_t>(static_cast<std::size_t>(config.shap_rows), test.size());
    if (n_rows == 0) throw EmptyDataset("no test rows to explain");
    const bool exact_ok = config.shap_exact && model.schema.n_features() <= 15;
    std::string exact_notice;
    if (config.shap_exact && !exact_ok)
        exact_notice = "note: exact mode requested but " +
                       std::to_string(model.schema.n_features()) +
                       " features exceed the 15-feature enumeration cap; using sampled mode\n";

    std::vector<ShapleyExplanation> explanations;
    std::ostringstream manifest;
    manifest << "background: " << background.origin << "\n";
    manifest << "mode: " << (exact_ok ? "exact" : "sampled") << "\n";
    if (!exact_ok)
        manifest << "sampled efficiency tolerance: 0.02 (|base + sum(phi) - prediction|)\n";
    manifest << exact_notice;
    for (std::size_t i = 0; i < n_rows; ++i) {
        const Eigen::VectorXd& x = test.records[i].features;
        const int target = predict_normalized(model, x).category;
        ShapleyExplanation e;
        if (exact_ok) {
            std::vector<int> active(model.schema.n_features());
            std::iota(active.begin(), active.end(), 0);
            e = exact_shapley(model, x, background, target, active);
        } else {
            e = sampled_shapley(model, x, background, target, config.shap_permutations,
                                derive_seed(config.seed, role_shap, i));
        }
        manifest << "row " << i << ": target_category=" << e.target_category
                 << " base_value=" << csv::format_double(e.base_value)
                 << " prediction=" << csv::format_double(e.prediction)
                 << " sum_phi=" << csv::format_double(e.phi.sum())
                 << " n_evaluations=" << e.n_evaluations << " seed="
                 << derive_seed(config.seed, role_shap, i) << "\n";
        explanations.push_back(std::move(e));
    }

    write_rows(config, "shap_bar.csv", export_plot_data(explanations, PlotKind::bar));
    write_rows(config, "shap_beeswarm.csv", export_plot_data(explanations, PlotKind::beeswarm));
    write_rows(config, "shap_force.csv",
               export_plot_data({explanations.front()}, PlotKind::force));
    write_text_atomic(artifact(config, "shap_manifest.txt"), manifest.str());
    note(config, "explain: " + std::to_string(explanations.size()) + " rows, " +
                     (exact_ok ? "exact" : "sampled") + " mode");
}

void cmd_evaluate(const RunConfig& config) {
    guard_outputs(config, {"eval_report.csv", "eval_confusion.csv"});
    const ReservoirModel model = load_model(artifact(config, "model.json"));
    const FeatureSchema schema = load_schema_artifact(config);
    FlowDataset test =
        load_csv(artifact(config, "test.csv"), schema, MissingValuePolicy::drop_row);
    test = subset_features(test, model.schema.names);

    const EvalReport report = evaluate_model(model, test, 0.0);
    write_rows(config, "eval_report.csv",
               {EvalReport::csv_header(),
                report.csv_row("Reservoir " + model.genome.notation())});
    write_rows(config, "eval_confusion.csv", confusion_rows(report.confusion));
    note(config, "evaluate: accuracy=" + csv::format_double(report.accuracy));
}

void cmd_datagen(const RunConfig& config) {
    guard_outputs(config, {"synth.csv"});
    SynthSpec spec = config.synth;
    spec.seed = derive_seed(config.seed, role_synth);
    write_dataset(config, "synth.csv", synth_generate(spec));
    note(config, "datagen: wrote " +
                     std::to_string(spec.n_per_class *
                                    static_cast<std::size_t>(spec.class_count)) +
                     " rows");
}

}  // namespace wannflow

#pragma once

#include <array>
#include <cstdint>
#include <json.hpp>
#include <string>

#include "wannflow/dataset.hpp"
#include "wannflow/pps.hpp"
#include "wannflow/reservoir.hpp"
#include "wannflow/search.hpp"

namespace wannflow {

/// One declarative description of a whole experiment.  Every random process
/// in a run derives its stream from `seed` plus a fixed role tag, so a config
/// plus a seed pins every artifact byte.
struct RunConfig {
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    bool overwrite = false;
    bool quiet = false;

    // data
    std::string data_csv;                   // when empty, ingest synthesizes data
    std::string schema_kind = "cicdarknet"; // "cicdarknet" | "synthetic" | "file"
    std::string schema_file;
    MissingValuePolicy missing_policy = MissingValuePolicy::drop_row;
    std::array<double, 3> split_fractions{0.7, 0.15, 0.15};
    SynthSpec synth;

    // pps
    double pps_threshold = 0.3;
    int pps_folds = 4;
    int pps_tree_depth = 4;

    // train / evaluate
    std::string genome_notation = "(13-11-09)";
    std::string genome_file;  // takes precedence over the notation when set
    EncodeMode encode_mode = EncodeMode::single_shot;
    int encode_steps = 10;
    double ridge_c = 1.0;
    ReadoutMode readout_mode = ReadoutMode::ridge;
    bool use_selected_features = true;  // honor pps selection when present
    bool fixed_zero_timing = false;     // report 0 instead of wall-clock fit time

    // search
    SearchConfig search;

    // shapley
    int shap_background = 100;
    int shap_permutations = 50;
    int shap_rows = 5;
    bool shap_exact = false;

    /// Parse and fully validate a config document; unknown keys are rejected.
    static RunConfig from_json(const nlohmann::json& j);
    void validate() const;
};

RunConfig load_run_config(const std::string& path);

/// Resolve the schema named by the config (built-in, synthetic, or file).
FeatureSchema resolve_schema(const RunConfig& config);

// Subcommand bodies.  Each reads its inputs, computes, and writes artifacts
// into config.out_dir atomically, refusing to overwrite existing files unless
// config.overwrite is set.  Errors surface as the library exception hierarchy.

/// load -> normalize -> stratified split; writes train/val/test.csv,
/// norm_stats.csv, schema.json, load_report.txt.
void cmd_ingest(const RunConfig& config);

/// Score every feature against the label on the train split; writes
/// pps_matrix.csv and selected_features.txt.
void cmd_pps(const RunConfig& config);

/// Fit the readout of the configured genome on the train split and evaluate
/// on the test split; writes model.json, report.csv, confusion.csv.
void cmd_train(const RunConfig& config);

/// Evolutionary topology search on train/val; writes search_history.csv,
/// best_genome.json, population.csv.
void cmd_search(const RunConfig& config);

/// Shapley attributions for test rows against a train-sampled background;
/// writes shap_bar.csv, shap_beeswarm.csv, shap_force.csv, shap_manifest.txt.
void cmd_explain(const RunConfig& config);

/// Evaluate a saved model on the test split; writes eval_report.csv,
/// eval_confusion.csv.
void cmd_evaluate(const RunConfig& config);

/// Generate the synthetic dataset as a raw CSV; writes synth.csv.
void cmd_datagen(const RunConfig& config);

}  // namespace wannflow

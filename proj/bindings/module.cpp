// Python bindings for the main operations: dataset synthesis/normalization/
// splitting, PPS feature scoring, reservoir training and prediction,
// topology search, Shapley attribution, and evaluation metrics.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wannflow/dataset.hpp"
#include "wannflow/errors.hpp"
#include "wannflow/metrics.hpp"
#include "wannflow/pipeline.hpp"
#include "wannflow/pps.hpp"
#include "wannflow/reservoir.hpp"
#include "wannflow/search.hpp"
#include "wannflow/serialize.hpp"
#include "wannflow/shapley.hpp"

namespace py = pybind11;
using namespace wannflow;

namespace {

py::dict report_to_dict(const EvalReport& report) {
    py::dict d;
    d["accuracy"] = report.accuracy;
    d["auc"] = report.auc_macro;
    d["recall"] = report.recall_macro;
    d["precision"] = report.precision_macro;
    d["f1"] = report.f1_macro;
    d["kappa"] = report.kappa;
    d["mcc"] = report.mcc;
    d["train_time_s"] = report.train_time_s;
    Eigen::MatrixXd confusion = report.confusion.cast<double>();
    d["confusion"] = confusion;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Flow-record traffic classification with stacked random-weight reservoirs";
    m.attr("__version__") = "1.0.0";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<ComputeError>(m, "ComputeError", PyExc_RuntimeError);

    // --- dataset ---
    py::class_<Category>(m, "Category")
        .def_readwrite("id", &Category::id)
        .def_readwrite("name", &Category::name);

    py::class_<FeatureSchema>(m, "FeatureSchema")
        .def(py::init<>())
        .def_readwrite("names", &FeatureSchema::names)
        .def_readwrite("label_name", &FeatureSchema::label_name)
        .def_static("cicdarknet_default", &FeatureSchema::cicdarknet_default)
        .def_static("synthetic", &FeatureSchema::synthetic)
        .def("n_features", &FeatureSchema::n_features)
        .def("n_classes", &FeatureSchema::n_classes);

    py::class_<NormStats>(m, "NormStats")
        .def_readwrite("mean", &NormStats::mean)
        .def_readwrite("stddev", &NormStats::stddev);

    py::class_<FlowDataset>(m, "FlowDataset")
        .def("__len__", &FlowDataset::size)
        .def("feature_matrix", &FlowDataset::feature_matrix)
        .def("labels", &FlowDataset::labels)
        .def("label_histogram", &FlowDataset::label_histogram)
        .def_readonly("schema", &FlowDataset::schema);

    py::class_<SynthSpec>(m, "SynthSpec")
        .def(py::init<>())
        .def_readwrite("n_per_class", &SynthSpec::n_per_class)
        .def_readwrite("n_features", &SynthSpec::n_features)
        .def_readwrite("n_informative", &SynthSpec::n_informative)
        .def_readwrite("class_count", &SynthSpec::class_count)
        .def_readwrite("separation", &SynthSpec::separation)
        .def_readwrite("seed", &SynthSpec::seed);

    m.def("synth_generate", &synth_generate, py::arg("spec"));
    m.def(
        "load_csv",
        [](const std::string& path, const FeatureSchema& schema, const std::string& policy) {
            const auto p = policy == "impute_median" ? MissingValuePolicy::impute_median
                                                     : MissingValuePolicy::drop_row;
            return load_csv(path, schema, p);
        },
        py::arg("path"), py::arg("schema"), py::arg("missing_policy") = "drop_row");
    m.def("fit_normalize", [](const FlowDataset& ds) {
        auto [normalized, stats] = fit_normalize(ds);
        return py::make_tuple(normalized, stats);
    });
    m.def(
        "stratified_split",
        [](const FlowDataset& ds, double train, double val, double test, std::uint64_t seed) {
            SplitResult r = stratified_split(ds, {train, val, test}, seed);
            return py::make_tuple(r.train, r.val, r.test);
        },
        py::arg("dataset"), py::arg("train") = 0.7, py::arg("val") = 0.15, py::arg("test") = 0.15,
        py::arg("seed") = 0);
    m.def("subset_features", &subset_features, py::arg("dataset"), py::arg("names"));

    // --- pps ---
    m.def("pearson_r", &pearson_r, py::arg("x"), py::arg("y"));
    m.def("mae", &mae, py::arg("pred"), py::arg("actual"));
    m.def("f_score", &f_score, py::arg("precision"), py::arg("recall"));
    m.def(
        "pps_score",
        [](const FlowDataset& ds, const std::string& feature, const std::string& target,
           int folds, int tree_depth, std::uint64_t seed) {
            PpsConfig config{folds, tree_depth, seed};
            const PpsResult r = pps_score(ds, feature, target, config);
            py::dict d;
            d["feature"] = r.feature;
            d["target"] = r.target;
            d["score"] = r.score;
            d["task_kind"] =
                r.task_kind == TaskKind::classification ? "classification" : "regression";
            d["model_metric"] = r.model_metric;
            d["baseline_metric"] = r.baseline_metric;
            return d;
        },
        py::arg("dataset"), py::arg("feature"), py::arg("target"), py::arg("folds") = 4,
        py::arg("tree_depth") = 4, py::arg("seed") = 0);
    m.def("select_features", &select_features, py::arg("scores"), py::arg("threshold") = 0.3);

    // --- reservoir ---
    py::class_<ReservoirGenome>(m, "ReservoirGenome")
        .def_static("parse_notation", &ReservoirGenome::parse_notation, py::arg("text"),
                    py::arg("seed") = 0)
        .def_static(
            "defaults",
            [](const std::vector<int>& sizes, std::uint64_t seed) {
                return ReservoirGenome::defaults(sizes, seed);
            },
            py::arg("layer_sizes"), py::arg("seed") = 0)
        .def_readwrite("layer_sizes", &ReservoirGenome::layer_sizes)
        .def_readwrite("leak_rates", &ReservoirGenome::leak_rates)
        .def_readwrite("density", &ReservoirGenome::density)
        .def_readwrite("spectral_radius", &ReservoirGenome::spectral_radius)
        .def_readwrite("seed", &ReservoirGenome::seed)
        .def("notation", &ReservoirGenome::notation);

    py::class_<ReservoirModel>(m, "ReservoirModel")
        .def_readonly("genome", &ReservoirModel::genome)
        .def_readonly("schema", &ReservoirModel::schema)
        .def("state_size", &ReservoirModel::state_size);

    m.def(
        "train_model",
        [](const ReservoirGenome& genome, const FlowDataset& normalized_train,
           const std::string& encode_mode, int encode_steps, double ridge_c,
           const std::string& readout) {
            ReservoirModel model = build_model(genome, normalized_train.schema,
                                               encode_mode_from_name(encode_mode), encode_steps);
            const auto mode = readout == "pseudoinverse" ? ReadoutMode::pseudoinverse
                                                         : ReadoutMode::ridge;
            train_readout(model, normalized_train, ridge_c, mode);
            return model;
        },
        py::arg("genome"), py::arg("normalized_train"), py::arg("encode_mode") = "single_shot",
        py::arg("encode_steps") = 10, py::arg("ridge_c") = 1.0, py::arg("readout") = "ridge");
    m.def(
        "predict",
        [](const ReservoirModel& model, const Eigen::VectorXd& flow, bool normalized) {
            const Prediction p =
                normalized ? predict_normalized(model, flow) : predict(model, flow);
            return py::make_tuple(p.category, p.probabilities);
        },
        py::arg("model"), py::arg("flow"), py::arg("normalized") = true);
    m.def(
        "evaluate_model",
        [](const ReservoirModel& model, const FlowDataset& normalized_test) {
            std::vector<int> truth = normalized_test.labels();
            std::vector<int> predicted;
            Eigen::MatrixXd scores(normalized_test.size(), model.schema.n_classes());
            for (std::size_t i = 0; i < normalized_test.size(); ++i) {
                const Prediction p =
                    predict_normalized(model, normalized_test.records[i].features);
                predicted.push_back(p.category);
                scores.row(static_cast<Eigen::Index>(i)) = p.probabilities;
            }
            const CountMatrix confusion =
                confusion_matrix(truth, predicted, model.schema.n_classes());
            return report_to_dict(summary(confusion, scores, truth, 0.0));
        },
        py::arg("model"), py::arg("normalized_test"));
    m.def("save_model", &save_model, py::arg("path"), py::arg("model"));
    m.def("load_model", &load_model, py::arg("path"));

    // --- search ---
    py::class_<SearchConfig>(m, "SearchConfig")
        .def(py::init<>())
        .def_readwrite("population_size", &SearchConfig::population_size)
        .def_readwrite("generations", &SearchConfig::generations)
        .def_readwrite("shared_weight_values", &SearchConfig::shared_weight_values)
        .def_readwrite("elitism_count", &SearchConfig::elitism_count)
        .def_readwrite("seed", &SearchConfig::seed)
        .def_readwrite("min_layers", &SearchConfig::min_layers)
        .def_readwrite("max_layers", &SearchConfig::max_layers)
        .def_readwrite("min_layer_size", &SearchConfig::min_layer_size)
        .def_readwrite("max_layer_size", &SearchConfig::max_layer_size)
        .def_property(
            "eval_mode",
            [](const SearchConfig& c) {
                return c.eval_mode == EvalMode::agnostic ? "agnostic" : "readout_trained";
            },
            [](SearchConfig& c, const std::string& mode) {
                if (mode == "agnostic") c.eval_mode = EvalMode::agnostic;
                else if (mode == "readout_trained") c.eval_mode = EvalMode::readout_trained;
                else throw ConfigError("unknown eval_mode: " + mode);
            });

    m.def(
        "run_search",
        [](const FlowDataset& train, const FlowDataset& val, const SearchConfig& config) {
            const SearchResult r = run_search(train, val, config);
            py::list history;
            for (const auto& g : r.history) {
                py::dict row;
                row["generation"] = g.generation;
                row["best_fitness"] = g.best_fitness;
                row["mean_fitness"] = g.mean_fitness;
                row["best_complexity"] = g.best_complexity;
                history.append(row);
            }
            py::dict out;
            out["best_genome"] = r.best.genome;
            out["best_fitness_mean"] = r.best.fitness_mean;
            out["best_fitness_min"] = r.best.fitness_min;
            out["best_complexity"] = r.best.complexity;
            out["history"] = history;
            return out;
        },
        py::arg("train"), py::arg("val"), py::arg("config"));

    // --- shapley ---
    m.def(
        "sampled_shapley",
        [](const ReservoirModel& model, const Eigen::VectorXd& x,
           const Eigen::MatrixXd& background, int target, int n_permutations,
           std::uint64_t seed) {
            BackgroundSet bg{background, "python background"};
            const ShapleyExplanation e =
                sampled_shapley(model, x, bg, target, n_permutations, seed);
            py::dict d;
            d["phi"] = e.phi;
            d["base_value"] = e.base_value;
            d["prediction"] = e.prediction;
            d["n_evaluations"] = e.n_evaluations;
            d["feature_names"] = e.feature_names;
            return d;
        },
        py::arg("model"), py::arg("x"), py::arg("background"), py::arg("target"),
        py::arg("n_permutations") = 50, py::arg("seed") = 0);
    m.def(
        "exact_shapley",
        [](const ReservoirModel& model, const Eigen::VectorXd& x,
           const Eigen::MatrixXd& background, int target) {
            BackgroundSet bg{background, "python background"};
            std::vector<int> active(static_cast<std::size_t>(x.size()));
            for (std::size_t i = 0; i < active.size(); ++i) active[i] = static_cast<int>(i);
            const ShapleyExplanation e = exact_shapley(model, x, bg, target, active);
            py::dict d;
            d["phi"] = e.phi;
            d["base_value"] = e.base_value;
            d["prediction"] = e.prediction;
            d["n_evaluations"] = e.n_evaluations;
            d["feature_names"] = e.feature_names;
            return d;
        },
        py::arg("model"), py::arg("x"), py::arg("background"), py::arg("target"));
}

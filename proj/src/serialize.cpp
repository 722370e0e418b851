#include "wannflow/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wannflow/errors.hpp"

namespace wannflow {

using nlohmann::json;

namespace {

constexpr int format_version = 1;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw DataError("matrix data length does not match its dimensions");
    Eigen::MatrixXd m(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = data[idx++].get<double>();
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json data = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(v[i]);
    return data;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

void check_version(const json& j, const std::string& kind) {
    if (j.at("format_version").get<int>() != format_version)
        throw DataError("unsupported " + kind + " format version");
    if (j.at("kind").get<std::string>() != kind)
        throw DataError("file is not a " + kind + " artifact");
}

}  // namespace

json schema_to_json(const FeatureSchema& schema) {
    json cats = json::array();
    for (const auto& c : schema.categories) cats.push_back({{"id", c.id}, {"name", c.name}});
    return json{{"names", schema.names}, {"label_name", schema.label_name},
                {"categories", std::move(cats)}};
}

FeatureSchema schema_from_json(const json& j) {
    FeatureSchema s;
    s.names = j.at("names").get<std::vector<std::string>>();
    s.label_name = j.at("label_name").get<std::string>();
    for (const auto& c : j.at("categories"))
        s.categories.push_back({c.at("id").get<int>(), c.at("name").get<std::string>()});
    s.validate();
    return s;
}

json genome_to_json(const ReservoirGenome& genome) {
    json acts = json::array();
    for (Activation a : genome.activations) acts.push_back(activation_name(a));
    json skips = json::array();
    for (const auto& [from, to] : genome.inter_layer_skips) skips.push_back({from, to});
    return json{{"format_version", format_version},
                {"kind", "reservoir_genome"},
                {"layer_sizes", genome.layer_sizes},
                {"leak_rates", genome.leak_rates},
                {"activations", std::move(acts)},
                {"density", genome.density},
                {"spectral_radius", genome.spectral_radius},
                {"input_scale", genome.input_scale},
                {"inter_layer_skips", std::move(skips)},
                {"seed", genome.seed}};
}

ReservoirGenome genome_from_json(const json& j) {
    check_version(j, "reservoir_genome");
    ReservoirGenome g;
    g.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    g.leak_rates = j.at("leak_rates").get<std::vector<double>>();
    for (const auto& a : j.at("activations"))
        g.activations.push_back(activation_from_name(a.get<std::string>()));
    g.density = j.at("density").get<double>();
    g.spectral_radius = j.at("spectral_radius").get<double>();
    g.input_scale = j.at("input_scale").get<double>();
    for (const auto& s : j.at("inter_layer_skips"))
        g.inter_layer_skips.emplace_back(s.at(0).get<int>(), s.at(1).get<int>());
    g.seed = j.at("seed").get<std::uint64_t>();
    g.validate();
    return g;
}

json model_to_json(const ReservoirModel& model) {
    json weights;
    weights["input_matrix"] = matrix_to_json(model.weights.input_matrix);
    weights["recurrent"] = json::array();
    for (const auto& m : model.weights.recurrent) weights["recurrent"].push_back(matrix_to_json(m));
    weights["inter_layer"] = json::array();
    for (const auto& m : model.weights.inter_layer)
        weights["inter_layer"].push_back(matrix_to_json(m));
    weights["skip"] = json::array();
    for (const auto& m : model.weights.skip) weights["skip"].push_back(matrix_to_json(m));
    weights["biases"] = json::array();
    for (const auto& b : model.weights.biases) weights["biases"].push_back(vector_to_json(b));

    json readout = nullptr;
    if (model.readout) {
        std::string mode = "ridge";
        if (model.readout->mode == ReadoutMode::pseudoinverse) mode = "pseudoinverse";
        if (model.readout->mode == ReadoutMode::random) mode = "random";
        readout = json{{"mode", mode},
                       {"ridge_c", model.readout->ridge_c},
                       {"beta", matrix_to_json(model.readout->beta)}};
    }

    json stats = nullptr;
    if (!model.norm_stats.empty())
        stats = json{{"mean", model.norm_stats.mean}, {"stddev", model.norm_stats.stddev}};

    return json{{"format_version", format_version},
                {"kind", "reservoir_model"},
                {"genome", genome_to_json(model.genome)},
                {"weights", std::move(weights)},
                {"readout", std::move(readout)},
                {"encode_mode", encode_mode_name(model.encode_mode)},
                {"encode_steps", model.encode_steps},
                {"schema", schema_to_json(model.schema)},
                {"norm_stats", std::move(stats)}};
}

ReservoirModel model_from_json(const json& j) {
    check_version(j, "reservoir_model");
    ReservoirModel model;
    model.genome = genome_from_json(j.at("genome"));
    const json& w = j.at("weights");
    model.weights.input_matrix = matrix_from_json(w.at("input_matrix"));
    for (const auto& m : w.at("recurrent")) model.weights.recurrent.push_back(matrix_from_json(m));
    for (const auto& m : w.at("inter_layer"))
        model.weights.inter_layer.push_back(matrix_from_json(m));
    for (const auto& m : w.at("skip")) model.weights.skip.push_back(matrix_from_json(m));
    for (const auto& b : w.at("biases")) model.weights.biases.push_back(vector_from_json(b));

    if (!j.at("readout").is_null()) {
        const json& r = j.at("readout");
        ReadoutModel readout;
        const std::string mode = r.at("mode").get<std::string>();
        if (mode == "ridge") readout.mode = ReadoutMode::ridge;
        else if (mode == "pseudoinverse") readout.mode = ReadoutMode::pseudoinverse;
        else if (mode == "random") readout.mode = ReadoutMode::random;
        else throw DataError("unknown readout mode: " + mode);
        readout.ridge_c = r.at("ridge_c").get<double>();
        readout.beta = matrix_from_json(r.at("beta"));
        model.readout = std::move(readout);
    }

    model.encode_mode = encode_mode_from_name(j.at("encode_mode").get<std::string>());
    model.encode_steps = j.at("encode_steps").get<int>();
    model.schema = schema_from_json(j.at("schema"));
    if (!j.at("norm_stats").is_null()) {
        model.norm_stats.mean = j.at("norm_stats").at("mean").get<std::vector<double>>();
        model.norm_stats.stddev = j.at("norm_stats").at("stddev").get<std::vector<double>>();
    }
    return model;
}

void save_genome(const std::string& path, const ReservoirGenome& genome) {
    write_text_atomic(path, genome_to_json(genome).dump(2) + "\n");
}

ReservoirGenome load_genome(const std::string& path) { return genome_from_json(load_json(path)); }

void save_model(const std::string& path, const ReservoirModel& model) {
    write_text_atomic(path, model_to_json(model).dump() + "\n");
}

ReservoirModel load_model(const std::string& path) { return model_from_json(load_json(path)); }

json load_json(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw DataError("cannot parse " + path + ": " + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open file for writing: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw DataError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw DataError("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

}  // namespace wannflow

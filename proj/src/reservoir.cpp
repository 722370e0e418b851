#include "wannflow/reservoir.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "wannflow/errors.hpp"
#include "wannflow/rng.hpp"

namespace wannflow {

namespace {
// Role tags for deriving independent weight streams from the genome seed.
constexpr std::uint64_t tag_input = 0x494e505554ull;      // "INPUT"
constexpr std::uint64_t tag_recurrent = 0x524543ull;      // "REC"
constexpr std::uint64_t tag_inter = 0x494e544552ull;      // "INTER"
constexpr std::uint64_t tag_skip = 0x534b4950ull;         // "SKIP"
constexpr std::uint64_t tag_bias = 0x42494153ull;         // "BIAS"
constexpr std::uint64_t tag_readout = 0x52454144ull;      // "READ"
}  // namespace

const std::vector<Activation>& activation_palette() {
    static const std::vector<Activation> p = {Activation::tanh_fn,  Activation::sigmoid,
                                              Activation::relu,     Activation::identity,
                                              Activation::sine,     Activation::gaussian};
    return p;
}

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::tanh_fn: return "tanh";
        case Activation::sigmoid: return "sigmoid";
        case Activation::relu: return "relu";
        case Activation::identity: return "identity";
        case Activation::sine: return "sine";
        case Activation::gaussian: return "gaussian";
    }
    throw ConfigError("unknown activation");
}

Activation activation_from_name(const std::string& name) {
    for (Activation a : activation_palette())
        if (activation_name(a) == name) return a;
    throw ConfigError("unknown activation name: " + name);
}

double apply_activation(Activation a, double v) {
    switch (a) {
        case Activation::tanh_fn: return std::tanh(v);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-v));
        case Activation::relu: return v > 0.0 ? v : 0.0;
        case Activation::identity: return v;
        case Activation::sine: return std::sin(v);
        case Activation::gaussian: return std::exp(-v * v);
    }
    throw ConfigError("unknown activation");
}

int ReservoirGenome::total_neurons() const {
    int total = 0;
    for (int s : layer_sizes) total += s;
    return total;
}

void ReservoirGenome::validate() const {
    const std::size_t l = layer_sizes.size();
    if (l == 0) throw ConfigError("genome needs at least one layer");
    if (leak_rates.size() != l || activations.size() != l)
        throw ConfigError("genome per-layer lists differ in length");
    for (int s : layer_sizes)
        if (s <= 0) throw ConfigError("layer sizes must be positive");
    for (double a : leak_rates)
        if (!(a > 0.0 && a <= 1.0)) throw ConfigError("leak rates must lie in (0, 1]");
    if (!(density > 0.0 && density <= 1.0)) throw ConfigError("density must lie in (0, 1]");
    if (!(spectral_radius > 0.0 && spectral_radius < 1.0))
        throw ConfigError("spectral radius must lie in (0, 1)");
    if (!(input_scale > 0.0)) throw ConfigError("input scale must be positive");
    std::set<std::pair<int, int>> seen;
    for (const auto& [from, to] : inter_layer_skips) {
        if (from < 0 || to >= static_cast<int>(l) || to - from < 2)
            throw ConfigError("skip (" + std::to_string(from) + ", " + std::to_string(to) +
                              ") must jump over at least one layer and stay in range");
        if (!seen.insert({from, to}).second)
            throw ConfigError("duplicate skip connection");
    }
}

ReservoirGenome ReservoirGenome::parse_notation(const std::string& text, std::uint64_t seed) {
    std::string body;
    for (char c : text)
        if (c != '(' && c != ')' && c != ' ') body.push_back(c);
    std::vector<int> sizes;
    std::stringstream ss(body);
    std::string part;
    while (std::getline(ss, part, '-')) {
        if (part.empty()) continue;
        try {
            sizes.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw ConfigError("bad genome notation: " + text);
        }
    }
    if (sizes.empty()) throw ConfigError("bad genome notation: " + text);
    return defaults(std::move(sizes), seed);
}

std::string ReservoirGenome::notation() const {
    std::string out = "(";
    for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
        if (i) out.push_back('-');
        if (layer_sizes[i] < 10) out.push_back('0');
        out += std::to_string(layer_sizes[i]);
    }
    out.push_back(')');
    return out;
}

ReservoirGenome ReservoirGenome::defaults(std::vector<int> layer_sizes, std::uint64_t seed) {
    ReservoirGenome g;
    g.layer_sizes = std::move(layer_sizes);
    g.leak_rates.assign(g.layer_sizes.size(), 0.5);
    g.activations.assign(g.layer_sizes.size(), Activation::tanh_fn);
    g.seed = seed;
    g.validate();
    return g;
}

std::int64_t ReservoirWeights::complexity() const {
    const auto nonzeros = [](const Eigen::MatrixXd& m) {
        std::int64_t n = 0;
        for (Eigen::Index i = 0; i < m.size(); ++i)
            if (m.data()[i] != 0.0) ++n;
        return n;
    };
    std::int64_t total = nonzeros(input_matrix);
    for (const auto& m : recurrent) total += nonzeros(m);
    for (const auto& m : inter_layer) total += nonzeros(m);
    for (const auto& m : skip) total += nonzeros(m);
    return total;
}

double measured_spectral_radius(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

Eigen::MatrixXd draw_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

// Keep exactly max(1, round(density * size)) entries, chosen uniformly.
void sparsify(Eigen::MatrixXd& m, double density, Rng& rng) {
    const std::size_t size = static_cast<std::size_t>(m.size());
    std::size_t keep = static_cast<std::size_t>(std::llround(density * static_cast<double>(size)));
    keep = std::max<std::size_t>(1, std::min(keep, size));
    if (keep == size) return;
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    rng.shuffle(idx);
    for (std::size_t i = keep; i < size; ++i) m.data()[idx[i]] = 0.0;
}

// Recurrent matrix for one layer: drawn, sparsified, and deterministic per
// (seed, layer, attempt).  The attempt index supports the one-shot resample
// when sparsification leaves a nilpotent matrix.
Eigen::MatrixXd raw_recurrent(const ReservoirGenome& g, int layer, int attempt) {
    Rng rng(derive_seed(g.seed, tag_recurrent, static_cast<std::uint64_t>(layer),
                        static_cast<std::uint64_t>(attempt)));
    const Eigen::Index n = g.layer_sizes[static_cast<std::size_t>(layer)];
    Eigen::MatrixXd m = draw_matrix(n, n, rng);
    sparsify(m, g.density, rng);
    return m;
}

// Unscaled draws shared by the normal and weight-agnostic instantiations, so
// both see the same sparsity masks and sign patterns.
ReservoirWeights raw_weights(const ReservoirGenome& g, std::size_t n_inputs,
                             std::vector<int>* recurrent_attempts) {
    g.validate();
    if (n_inputs == 0) throw ConfigError("reservoir needs at least one input feature");
    const int l = g.n_layers();
    ReservoirWeights w;
    {
        Rng rng(derive_seed(g.seed, tag_input));
        w.input_matrix = draw_matrix(g.layer_sizes[0], static_cast<Eigen::Index>(n_inputs), rng);
    }
    w.recurrent.resize(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) {
        Eigen::MatrixXd m = raw_recurrent(g, i, 0);
        int attempt = 0;
        if (measured_spectral_radius(m) == 0.0) {
            m = raw_recurrent(g, i, 1);
            attempt = 1;
        }
        w.recurrent[static_cast<std::size_t>(i)] = std::move(m);
        if (recurrent_attempts) recurrent_attempts->push_back(attempt);
    }
    w.inter_layer.resize(static_cast<std::size_t>(l));
    for (int i = 1; i < l; ++i) {
        Rng rng(derive_seed(g.seed, tag_inter, static_cast<std::uint64_t>(i)));
        w.inter_layer[static_cast<std::size_t>(i)] =
            draw_matrix(g.layer_sizes[static_cast<std::size_t>(i)],
                        g.layer_sizes[static_cast<std::size_t>(i - 1)], rng);
    }
    for (std::size_t s = 0; s < g.inter_layer_skips.size(); ++s) {
        const auto& [from, to] = g.inter_layer_skips[s];
        Rng rng(derive_seed(g.seed, tag_skip, static_cast<std::uint64_t>(from),
                            static_cast<std::uint64_t>(to)));
        w.skip.push_back(draw_matrix(g.layer_sizes[static_cast<std::size_t>(to)],
                                     g.layer_sizes[static_cast<std::size_t>(from)], rng));
    }
    for (int i = 0; i < l; ++i) {
        Rng rng(derive_seed(g.seed, tag_bias, static_cast<std::uint64_t>(i)));
        Eigen::VectorXd b(g.layer_sizes[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < b.size(); ++j) b[j] = rng.uniform(-1.0, 1.0);
        w.biases.push_back(std::move(b));
    }
    return w;
}

void map_to_shared(Eigen::MatrixXd& m, double shared_weight) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double v = m.data()[i];
        if (v != 0.0) m.data()[i] = v > 0.0 ? shared_weight : -shared_weight;
    }
}

}  // namespace

ReservoirWeights instantiate(const ReservoirGenome& genome, std::size_t n_inputs) {
    ReservoirWeights w = raw_weights(genome, n_inputs, nullptr);
    for (std::size_t i = 0; i < w.recurrent.size(); ++i) {
        const double radius = measured_spectral_radius(w.recurrent[i]);
        if (radius == 0.0)
            throw ZeroSpectralRadius("layer " + std::to_string(i) + " after resampling");
        w.recurrent[i] *= genome.spectral_radius / radius;
    }
    w.input_matrix *= genome.input_scale;
    return w;
}

ReservoirWeights instantiate_shared(const ReservoirGenome& genome, std::size_t n_inputs,
                                    double shared_weight) {
    ReservoirWeights w = raw_weights(genome, n_inputs, nullptr);
    map_to_shared(w.input_matrix, shared_weight);
    for (auto& m : w.recurrent) map_to_shared(m, shared_weight);
    for (auto& m : w.inter_layer) map_to_shared(m, shared_weight);
    for (auto& m : w.skip) map_to_shared(m, shared_weight);
    for (auto& b : w.biases) {
        for (Eigen::Index i = 0; i < b.size(); ++i)
            if (b[i] != 0.0) b[i] = b[i] > 0.0 ? shared_weight : -shared_weight;
    }
    return w;
}

ReadoutModel fit_readout(const Eigen::MatrixXd& h, const std::vector<int>& labels, int k,
                         double ridge_c, ReadoutMode mode) {
    if (static_cast<std::size_t>(h.rows()) != labels.size())
        throw DimensionMismatch("hidden matrix rows do not match label count");
    if (h.rows() == 0) throw InsufficientRows("fit_readout needs at least 1 row");
    if (mode == ReadoutMode::random)
        throw ConfigError("fit_readout cannot produce a random readout; use random_readout");
    if (mode == ReadoutMode::ridge && !(ridge_c > 0.0))
        throw ConfigError("ridge mode requires ridge_c > 0");

    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(h.rows(), k);
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const int label = labels[static_cast<std::size_t>(i)];
        if (label < 0 || label >= k) throw LabelOutOfRange(label, k, static_cast<std::size_t>(i));
        targets(i, label) = 1.0;
    }

    ReadoutModel out;
    out.ridge_c = ridge_c;
    out.mode = mode;
    if (mode == ReadoutMode::ridge) {
        const Eigen::Index m = h.cols();
        Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(m, m) / ridge_c;
        gram.noalias() += h.transpose() * h;
        out.beta = gram.ldlt().solve(h.transpose() * targets);
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& sv = svd.singularValues();
        const double cutoff = sv.size() > 0 ? 1e-12 * sv[0] : 0.0;
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv[i] > cutoff && sv[i] > 0.0) inv[i] = 1.0 / sv[i];
        out.beta = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * targets;
    }
    return out;
}

ReadoutModel random_readout(Eigen::Index m, int k, std::uint64_t seed) {
    Rng rng(derive_seed(seed, tag_readout));
    ReadoutModel out;
    out.mode = ReadoutMode::random;
    out.beta.resize(m, k);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < k; ++j) out.beta(i, j) = rng.uniform(-1.0, 1.0);
    return out;
}

std::string encode_mode_name(EncodeMode m) {
    return m == EncodeMode::single_shot ? "single_shot" : "sequence";
}

EncodeMode encode_mode_from_name(const std::string& name) {
    if (name == "single_shot") return EncodeMode::single_shot;
    if (name == "sequence") return EncodeMode::sequence;
    throw ConfigError("unknown encode mode: " + name);
}

Eigen::Index ReservoirModel::state_size() const {
    Eigen::Index total = 0;
    for (int s : genome.layer_sizes) total += s;
    return total;
}

ReservoirModel build_model(const ReservoirGenome& genome, const FeatureSchema& schema,
                           EncodeMode mode, int encode_steps) {
    if (encode_steps < 1) throw ConfigError("encode_steps must be at least 1");
    ReservoirModel model;
    model.genome = genome;
    model.schema = schema;
    model.encode_mode = mode;
    model.encode_steps = encode_steps;
    model.weights = instantiate(genome, schema.n_features());
    return model;
}

std::vector<Eigen::VectorXd> zero_state(const ReservoirModel& model) {
    std::vector<Eigen::VectorXd> state;
    for (int s : model.genome.layer_sizes) state.push_back(Eigen::VectorXd::Zero(s));
    return state;
}

std::vector<Eigen::VectorXd> advance(const ReservoirModel& model,
                                     const std::vector<Eigen::VectorXd>& state,
                                     const Eigen::VectorXd& u) {
    const auto& g = model.genome;
    const auto& w = model.weights;
    const int l = g.n_layers();
    if (static_cast<int>(state.size()) != l) throw DimensionMismatch("state has wrong layer count");
    for (int i = 0; i < l; ++i)
        if (state[static_cast<std::size_t>(i)].size() != g.layer_sizes[static_cast<std::size_t>(i)])
            throw DimensionMismatch("state layer " + std::to_string(i) + " has wrong size");
    if (u.size() != w.input_matrix.cols()) throw DimensionMismatch("input vector has wrong length");

    std::vector<Eigen::VectorXd> next(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) {
        const std::size_t li = static_cast<std::size_t>(i);
        Eigen::VectorXd drive = w.biases[li];
        if (i == 0) drive.noalias() += w.input_matrix * u;
        else drive.noalias() += w.inter_layer[li] * next[li - 1];
        drive.noalias() += w.recurrent[li] * state[li];
        for (std::size_t s = 0; s < g.inter_layer_skips.size(); ++s) {
            const auto& [from, to] = g.inter_layer_skips[s];
            if (to == i) drive.noalias() += w.skip[s] * next[static_cast<std::size_t>(from)];
        }
        const double a = g.leak_rates[li];
        Eigen::VectorXd activated(drive.size());
        for (Eigen::Index j = 0; j < drive.size(); ++j)
            activated[j] = apply_activation(g.activations[li], drive[j]);
        next[li] = (1.0 - a) * state[li] + a * activated;
    }
    return next;
}

namespace {

Eigen::VectorXd concat_states(const std::vector<Eigen::VectorXd>& state) {
    Eigen::Index total = 0;
    for (const auto& s : state) total += s.size();
    Eigen::VectorXd h(total);
    Eigen::Index pos = 0;
    for (const auto& s : state) {
        h.segment(pos, s.size()) = s;
        pos += s.size();
    }
    return h;
}

}  // namespace

Eigen::VectorXd encode(const ReservoirModel& model, const Eigen::VectorXd& flow) {
    const auto& g = model.genome;
    const auto& w = model.weights;
    if (flow.size() != w.input_matrix.cols())
        throw DimensionMismatch("flow vector has wrong length");
    if (model.encode_mode == EncodeMode::sequence) {
        std::vector<Eigen::VectorXd> state = zero_state(model);
        for (int t = 0; t < model.encode_steps; ++t) state = advance(model, state, flow);
        return concat_states(state);
    }
    // single shot: one leak-free forward sweep through the stack
    std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(g.n_layers()));
    for (int i = 0; i < g.n_layers(); ++i) {
        const std::size_t li = static_cast<std::size_t>(i);
        Eigen::VectorXd drive = w.biases[li];
        if (i == 0) drive.noalias() += w.input_matrix * flow;
        else drive.noalias() += w.inter_layer[li] * out[li - 1];
        for (std::size_t s = 0; s < g.inter_layer_skips.size(); ++s) {
            const auto& [from, to] = g.inter_layer_skips[s];
            if (to == i) drive.noalias() += w.skip[s] * out[static_cast<std::size_t>(from)];
        }
        out[li].resize(drive.size());
        for (Eigen::Index j = 0; j < drive.size(); ++j)
            out[li][j] = apply_activation(g.activations[li], drive[j]);
    }
    return concat_states(out);
}

Eigen::MatrixXd encode_matrix(const ReservoirModel& model, const FlowDataset& normalized) {
    Eigen::MatrixXd h(normalized.size(), model.state_size());
    for (std::size_t i = 0; i < normalized.size(); ++i)
        h.row(static_cast<Eigen::Index>(i)) = encode(model, normalized.records[i].features);
    return h;
}

void train_readout(ReservoirModel& model, const FlowDataset& normalized_train, double ridge_c,
                   ReadoutMode mode) {
    if (normalized_train.size() == 0) throw EmptyDataset("train_readout");
    const Eigen::MatrixXd h = encode_matrix(model, normalized_train);
    model.readout = fit_readout(h, normalized_train.labels(),
                                normalized_train.schema.n_classes(), ridge_c, mode);
    if (normalized_train.norm_stats) model.norm_stats = *normalized_train.norm_stats;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& scores) {
    const double shift = scores.maxCoeff();
    Eigen::VectorXd e = (scores.array() - shift).exp();
    return e / e.sum();
}

Prediction predict_normalized(const ReservoirModel& model, const Eigen::VectorXd& flow) {
    if (!model.readout) throw UntrainedModel();
    Prediction p;
    const Eigen::VectorXd h = encode(model, flow);
    p.scores = model.readout->beta.transpose() * h;
    p.probabilities = softmax(p.scores);
    p.category = 0;
    for (Eigen::Index i = 1; i < p.scores.size(); ++i)
        if (p.scores[i] > p.scores[p.category]) p.category = static_cast<int>(i);
    return p;
}

Prediction predict(const ReservoirModel& model, const Eigen::VectorXd& raw_flow) {
    if (model.norm_stats.empty())
        throw ComputeError("model has no normalization statistics; use predict_normalized");
    if (static_cast<std::size_t>(raw_flow.size()) != model.norm_stats.mean.size())
        throw DimensionMismatch("flow vector has wrong length");
    Eigen::VectorXd normalized(raw_flow.size());
    for (Eigen::Index j = 0; j < raw_flow.size(); ++j)
        normalized[j] = (raw_flow[j] - model.norm_stats.mean[static_cast<std::size_t>(j)]) /
                        model.norm_stats.stddev[static_cast<std::size_t>(j)];
    return predict_normalized(model, normalized);
}

}  // namespace wannflow

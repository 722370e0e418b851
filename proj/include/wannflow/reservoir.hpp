#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wannflow/dataset.hpp"

namespace wannflow {

enum class Activation { tanh_fn, sigmoid, relu, identity, sine, gaussian };

const std::vector<Activation>& activation_palette();
std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);
double apply_activation(Activation a, double v);

/// Blueprint of a stacked leaky reservoir: everything needed to regenerate
/// the weight matrices deterministically from the seed.
struct ReservoirGenome {
    std::vector<int> layer_sizes;
    std::vector<double> leak_rates;
    std::vector<Activation> activations;
    double density = 1.0;          // fraction of non-zero recurrent connections
    double spectral_radius = 0.9;  // echo-state scaling target, must be < 1
    double input_scale = 1.0;
    /// Extra forward connections (from_layer, to_layer), 0-based, skipping at
    /// least one layer (adjacent layers are already chained).
    std::vector<std::pair<int, int>> inter_layer_skips;
    std::uint64_t seed = 0;

    int n_layers() const { return static_cast<int>(layer_sizes.size()); }
    int total_neurons() const;
    void validate() const;  // throws ConfigError on any violated bound

    /// "(13-11-09)" <-> layer sizes [13, 11, 9].
    static ReservoirGenome parse_notation(const std::string& text, std::uint64_t seed = 0);
    std::string notation() const;

    /// tanh everywhere, leak 0.5, density 1, spectral radius 0.9, unit input scale.
    static ReservoirGenome defaults(std::vector<int> layer_sizes, std::uint64_t seed = 0);
};

struct ReservoirWeights {
    Eigen::MatrixXd input_matrix;               // N_1 x D
    std::vector<Eigen::MatrixXd> recurrent;     // per layer, N_l x N_l
    std::vector<Eigen::MatrixXd> inter_layer;   // [l] = N_l x N_{l-1}; entry 0 unused
    std::vector<Eigen::MatrixXd> skip;          // parallel to genome.inter_layer_skips
    std::vector<Eigen::VectorXd> biases;        // per layer

    /// Non-zero connection count over input, recurrent, inter-layer, and skip
    /// matrices (biases excluded).
    std::int64_t complexity() const;
};

/// Draw all weights uniform on [-1, 1] from the genome seed, sparsify the
/// recurrent matrices to the requested density, rescale each to the genome's
/// spectral radius, and scale the input matrix by input_scale.
ReservoirWeights instantiate(const ReservoirGenome& genome, std::size_t n_inputs);

/// Weight-agnostic variant: identical sparsity mask and sign pattern, but
/// every kept entry (including biases) becomes sign(draw) * shared_weight.
/// No spectral rescaling or input scaling — the shared magnitude is the point.
ReservoirWeights instantiate_shared(const ReservoirGenome& genome, std::size_t n_inputs,
                                    double shared_weight);

/// Largest eigenvalue magnitude of a square matrix.
double measured_spectral_radius(const Eigen::MatrixXd& m);

enum class ReadoutMode { ridge, pseudoinverse, random };

struct ReadoutModel {
    Eigen::MatrixXd beta;  // M x K
    double ridge_c = 1.0;
    ReadoutMode mode = ReadoutMode::ridge;
};

/// Closed-form readout fit on hidden states H (n x M) against one-hot targets
/// built from the labels.  ridge solves (I/C + H^T H) beta = H^T T; the
/// pseudoinverse mode zeroes singular values below 1e-12 * sigma_max.
ReadoutModel fit_readout(const Eigen::MatrixXd& h, const std::vector<int>& labels, int k,
                         double ridge_c, ReadoutMode mode);

/// Untrained linear readout with entries uniform on [-1, 1] from the seed.
ReadoutModel random_readout(Eigen::Index m, int k, std::uint64_t seed);

enum class EncodeMode { single_shot, sequence };
std::string encode_mode_name(EncodeMode m);
EncodeMode encode_mode_from_name(const std::string& name);

struct Prediction {
    int category = 0;
    Eigen::VectorXd scores;         // h * beta
    Eigen::VectorXd probabilities;  // softmax(scores)
};

/// A usable classifier: genome + instantiated weights + optional readout,
/// carrying the feature schema and normalization statistics it was fit with.
struct ReservoirModel {
    ReservoirGenome genome;
    ReservoirWeights weights;
    std::optional<ReadoutModel> readout;
    EncodeMode encode_mode = EncodeMode::single_shot;
    int encode_steps = 10;  // sequence-mode iterations T_enc
    FeatureSchema schema;
    NormStats norm_stats;

    std::size_t n_inputs() const { return schema.n_features(); }
    Eigen::Index state_size() const;  // sum of layer sizes
};

/// Instantiate weights for the given schema (model lacks readout/norm_stats).
ReservoirModel build_model(const ReservoirGenome& genome, const FeatureSchema& schema,
                           EncodeMode mode = EncodeMode::single_shot, int encode_steps = 10);

/// One step of the leaky state update for every layer.  Layer l reads the
/// current-step output of layer l-1 (and of any skip source), so layers are
/// updated bottom to top within the step.
std::vector<Eigen::VectorXd> advance(const ReservoirModel& model,
                                     const std::vector<Eigen::VectorXd>& state,
                                     const Eigen::VectorXd& u);

std::vector<Eigen::VectorXd> zero_state(const ReservoirModel& model);

/// Hidden representation of one normalized flow vector: sequence mode runs
/// encode_steps advances from zero state with the flow held constant;
/// single-shot mode is one leak-free forward sweep h_l = g(W_l h_{l-1} + b_l).
/// Returns the concatenated states of all layers.
Eigen::VectorXd encode(const ReservoirModel& model, const Eigen::VectorXd& flow);

/// Row-per-record encoding of a normalized dataset.
Eigen::MatrixXd encode_matrix(const ReservoirModel& model, const FlowDataset& normalized);

/// Fit the model's readout on an already-normalized training set.
void train_readout(ReservoirModel& model, const FlowDataset& normalized_train, double ridge_c,
                   ReadoutMode mode);

/// Classify a raw flow vector: normalize with the stored stats, encode, apply
/// the readout; argmax with lowest-id tie-break; softmax probabilities.
Prediction predict(const ReservoirModel& model, const Eigen::VectorXd& raw_flow);

/// Same, for a flow vector that is already normalized.
Prediction predict_normalized(const ReservoirModel& model, const Eigen::VectorXd& flow);

Eigen::VectorXd softmax(const Eigen::VectorXd& scores);

}  // namespace wannflow

#include <doctest.h>

#include <cmath>

#include "wannflow/dataset.hpp"
#include "wannflow/errors.hpp"
#include "wannflow/reservoir.hpp"
#include "wannflow/rng.hpp"

using namespace wannflow;

namespace {

Eigen::VectorXd vec1(double v) {
    Eigen::VectorXd x(1);
    x[0] = v;
    return x;
}

Eigen::MatrixXd mat1(double v) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = v;
    return m;
}

// Model with hand-set weights: n layers of size 1 each, so every state update
// can be worked out by hand.  All recurrent weights start at zero.
ReservoirModel scalar_chain(int n_layers, Activation act, double leak) {
    ReservoirGenome g;
    g.layer_sizes.assign(static_cast<std::size_t>(n_layers), 1);
    g.leak_rates.assign(static_cast<std::size_t>(n_layers), leak);
    g.activations.assign(static_cast<std::size_t>(n_layers), act);
    g.seed = 99;
    ReservoirModel m = build_model(g, FeatureSchema::synthetic(1, 2));
    m.weights.input_matrix = mat1(1.0);
    for (auto& r : m.weights.recurrent) r = mat1(0.0);
    for (int l = 1; l < n_layers; ++l) m.weights.inter_layer[static_cast<std::size_t>(l)] = mat1(1.0);
    for (auto& b : m.weights.biases) b = vec1(0.0);
    return m;
}

std::int64_t count_nonzeros(const Eigen::MatrixXd& m) {
    std::int64_t n = 0;
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (m.data()[i] != 0.0) ++n;
    return n;
}

// Independent dense solver: Gaussian elimination with partial pivoting and
// back substitution, no library decompositions.
Eigen::MatrixXd solve_gauss(Eigen::MatrixXd a, Eigen::MatrixXd b) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        for (Eigen::Index r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        a.row(col).swap(a.row(pivot));
        b.row(col).swap(b.row(pivot));
        for (Eigen::Index r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            a.row(r) -= f * a.row(col);
            b.row(r) -= f * b.row(col);
        }
    }
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, b.cols());
    for (Eigen::Index r = n - 1; r >= 0; --r) {
        x.row(r) = b.row(r);
        for (Eigen::Index c = r + 1; c < n; ++c) x.row(r) -= a(r, c) * x.row(c);
        x.row(r) /= a(r, r);
    }
    return x;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

}  // namespace

TEST_CASE("activation functions hit their textbook values") {
    CHECK(apply_activation(Activation::tanh_fn, 0.5) == std::tanh(0.5));
    CHECK(apply_activation(Activation::sigmoid, 0.0) == 0.5);
    CHECK(apply_activation(Activation::relu, -2.0) == 0.0);
    CHECK(apply_activation(Activation::relu, 3.0) == 3.0);
    CHECK(apply_activation(Activation::identity, -7.0) == -7.0);
    CHECK(apply_activation(Activation::sine, 0.0) == 0.0);
    CHECK(apply_activation(Activation::gaussian, 0.0) == 1.0);
    CHECK(apply_activation(Activation::gaussian, 1.0) == std::exp(-1.0));
}

TEST_CASE("activation names round-trip through the palette") {
    CHECK(activation_palette().size() == 6);
    for (Activation a : activation_palette())
        CHECK(activation_from_name(activation_name(a)) == a);
    CHECK_THROWS_AS(activation_from_name("swish"), ConfigError);
}

TEST_CASE("genome notation parses and prints with zero padding") {
    const ReservoirGenome g = ReservoirGenome::parse_notation("(13-11-09)", 5);
    CHECK(g.layer_sizes == std::vector<int>{13, 11, 9});
    CHECK(g.seed == 5);
    CHECK(g.notation() == "(13-11-09)");
    CHECK(ReservoirGenome::defaults({5, 10}).notation() == "(05-10)");
    CHECK(ReservoirGenome::parse_notation("13-11-9").layer_sizes == std::vector<int>{13, 11, 9});
    CHECK_THROWS_AS(ReservoirGenome::parse_notation("(a-b)"), ConfigError);
    CHECK_THROWS_AS(ReservoirGenome::parse_notation("()"), ConfigError);
}

TEST_CASE("genome defaults: tanh, leak one half, full density") {
    const ReservoirGenome g = ReservoirGenome::defaults({4, 4});
    CHECK(g.leak_rates == std::vector<double>{0.5, 0.5});
    CHECK(g.activations == std::vector<Activation>{Activation::tanh_fn, Activation::tanh_fn});
    CHECK(g.density == 1.0);
    CHECK(g.spectral_radius == 0.9);
    CHECK(g.input_scale == 1.0);
    CHECK(g.total_neurons() == 8);
}

TEST_CASE("genome validation enforces every bound") {
    const auto broken = [](auto mutate_fn) {
        ReservoirGenome g = ReservoirGenome::defaults({4, 4, 4});
        mutate_fn(g);
        return g;
    };
    CHECK_THROWS_AS(broken([](ReservoirGenome& g) { g.spectral_radius = 1.0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ReservoirGenome& g) { g.spectral_radius = 0.0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ReservoirGenome& g) { g.leak_rates[0] = 0.0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ReservoirGenome& g) { g.leak_rates[0] = 1.5; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ReservoirGenome& g) { g.density = 0.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](ReservoirGenome& g) { g.layer_sizes[1] = 0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ReservoirGenome& g) { g.leak_rates.pop_back(); }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ReservoirGenome& g) { g.inter_layer_skips = {{0, 1}}; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ReservoirGenome& g) { g.inter_layer_skips = {{0, 3}}; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(
        broken([](ReservoirGenome& g) { g.inter_layer_skips = {{0, 2}, {0, 2}}; }).validate(),
        ConfigError);
    CHECK_NOTHROW(broken([](ReservoirGenome& g) { g.inter_layer_skips = {{0, 2}}; }).validate());
}

TEST_CASE("instantiate rescales every recurrent matrix to the target spectral radius") {
    ReservoirGenome g = ReservoirGenome::defaults({12, 7}, 21);
    const ReservoirWeights w = instantiate(g, 5);
    CHECK(std::abs(measured_spectral_radius(w.recurrent[0]) - 0.9) < 1e-9);
    CHECK(std::abs(measured_spectral_radius(w.recurrent[1]) - 0.9) < 1e-9);
    CHECK(w.input_matrix.rows() == 12);
    CHECK(w.input_matrix.cols() == 5);
    CHECK(w.inter_layer[1].rows() == 7);
    CHECK(w.inter_layer[1].cols() == 12);
    CHECK(w.biases[0].size() == 12);

    g.spectral_radius = 0.4;
    const ReservoirWeights w2 = instantiate(g, 5);
    CHECK(std::abs(measured_spectral_radius(w2.recurrent[0]) - 0.4) < 1e-9);
}

TEST_CASE("density keeps an exact count of recurrent connections") {
    ReservoirGenome g = ReservoirGenome::defaults({10}, 8);
    g.density = 0.37;
    CHECK(count_nonzeros(instantiate(g, 3).recurrent[0]) == 37);
    g.density = 1.0;
    CHECK(count_nonzeros(instantiate(g, 3).recurrent[0]) == 100);
    // A 10x10 matrix sparsified to a single off-diagonal entry is nilpotent,
    // so the echo-state rescale has nothing to scale and must refuse.
    g.density = 0.005;
    CHECK_THROWS_AS(instantiate(g, 3), ZeroSpectralRadius);

    // On a 1x1 layer the only possible entry is the self-loop, so the
    // floor of one connection survives rescaling.
    ReservoirGenome tiny = ReservoirGenome::defaults({1}, 8);
    tiny.density = 0.005;
    CHECK(count_nonzeros(instantiate(tiny, 3).recurrent[0]) == 1);
}

TEST_CASE("input_scale multiplies the input matrix and nothing else") {
    ReservoirGenome g = ReservoirGenome::defaults({6}, 4);
    const ReservoirWeights base = instantiate(g, 4);
    g.input_scale = 2.5;
    const ReservoirWeights scaled = instantiate(g, 4);
    CHECK(scaled.input_matrix == Eigen::MatrixXd(2.5 * base.input_matrix));
    CHECK(scaled.recurrent[0] == base.recurrent[0]);
    CHECK(scaled.biases[0] == base.biases[0]);
}

TEST_CASE("instantiation is a pure function of the genome") {
    const ReservoirGenome g = ReservoirGenome::defaults({9, 5}, 777);
    const ReservoirWeights a = instantiate(g, 6);
    const ReservoirWeights b = instantiate(g, 6);
    CHECK(a.input_matrix == b.input_matrix);
    CHECK(a.recurrent[0] == b.recurrent[0]);
    CHECK(a.recurrent[1] == b.recurrent[1]);
    CHECK(a.biases[1] == b.biases[1]);

    ReservoirGenome other = g;
    other.seed = 778;
    CHECK(instantiate(other, 6).input_matrix != a.input_matrix);
}

TEST_CASE("shared-weight instantiation collapses magnitudes but keeps structure") {
    ReservoirGenome g = ReservoirGenome::defaults({10, 6}, 31);
    g.density = 0.5;
    g.inter_layer_skips = {};
    const ReservoirWeights plain = instantiate(g, 7);
    const ReservoirWeights shared = instantiate_shared(g, 7, 2.0);

    // Same sparsity mask, same signs, but every kept entry is exactly +/- 2.
    REQUIRE(shared.recurrent[0].rows() == plain.recurrent[0].rows());
    for (Eigen::Index i = 0; i < shared.recurrent[0].size(); ++i) {
        const double s = shared.recurrent[0].data()[i];
        const double p = plain.recurrent[0].data()[i];
        if (p == 0.0) {
            CHECK(s == 0.0);
        } else {
            CHECK(std::abs(s) == 2.0);
            CHECK(s * p > 0.0);
        }
    }
    for (Eigen::Index i = 0; i < shared.input_matrix.size(); ++i)
        CHECK(std::abs(shared.input_matrix.data()[i]) == 2.0);
    for (Eigen::Index i = 0; i < shared.biases[0].size(); ++i)
        CHECK(std::abs(shared.biases[0][i]) == 2.0);
    CHECK(shared.complexity() == plain.complexity());
    // No spectral rescaling happens in shared mode.
    CHECK(std::abs(measured_spectral_radius(shared.recurrent[0]) - 0.9) > 1e-6);
}

TEST_CASE("complexity counts non-zero connections, excluding biases") {
    ReservoirGenome g = ReservoirGenome::defaults({4, 3, 2}, 12);
    g.inter_layer_skips = {{0, 2}};
    // input 4x5 + recurrent (16 + 9 + 4) + inter (3x4 + 2x3) + skip 2x4 = 75.
    CHECK(instantiate(g, 5).complexity() == 75);
    g.density = 0.5;
    // Recurrent keeps round(0.5 * size^2) per layer: 8 + 5 + 2.
    CHECK(instantiate(g, 5).complexity() == 20 + 15 + 18 + 8);
}

TEST_CASE("advance blends the previous state through the leak rate") {
    ReservoirModel m = scalar_chain(1, Activation::tanh_fn, 0.5);
    m.weights.recurrent[0] = mat1(0.5);
    m.weights.biases[0] = vec1(0.2);
    const auto next = advance(m, {vec1(0.1)}, vec1(1.0));
    // drive = 0.2 + 1*1 + 0.5*0.1 = 1.25; next = 0.5*0.1 + 0.5*tanh(1.25).
    CHECK(next[0][0] == doctest::Approx(0.05 + 0.5 * std::tanh(1.25)).epsilon(1e-15));
}

TEST_CASE("within one step, each layer reads the current output of the layer below") {
    ReservoirModel m = scalar_chain(2, Activation::identity, 1.0);
    const auto next = advance(m, zero_state(m), vec1(3.0));
    CHECK(next[0][0] == 3.0);
    CHECK(next[1][0] == 3.0);  // sees layer 0's fresh value, not the zero state
}

TEST_CASE("skip connections feed forward across layers in the same step") {
    ReservoirModel m = scalar_chain(3, Activation::identity, 1.0);
    m.genome.inter_layer_skips = {{0, 2}};
    m.weights.skip = {mat1(10.0)};
    const auto next = advance(m, zero_state(m), vec1(2.0));
    CHECK(next[2][0] == 2.0 + 10.0 * 2.0);
}

TEST_CASE("a small leak rate mostly preserves the old state") {
    ReservoirModel m = scalar_chain(1, Activation::identity, 0.25);
    const auto next = advance(m, {vec1(8.0)}, vec1(4.0));
    CHECK(next[0][0] == 0.75 * 8.0 + 0.25 * 4.0);
}

TEST_CASE("advance validates state and input shapes") {
    ReservoirModel m = scalar_chain(2, Activation::tanh_fn, 0.5);
    CHECK_THROWS_AS(advance(m, {vec1(0.0)}, vec1(1.0)), DimensionMismatch);
    Eigen::VectorXd long_u(2);
    long_u << 1.0, 2.0;
    CHECK_THROWS_AS(advance(m, zero_state(m), long_u), DimensionMismatch);
}

TEST_CASE("state trajectories forget their initial conditions") {
    // Echo-state washout: under a shared input sequence, two different initial
    // states converge once the recurrent gain sits below one.
    const ReservoirGenome base = ReservoirGenome::defaults({10, 8}, 0);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        ReservoirGenome g = base;
        g.seed = seed;
        g.leak_rates = {1.0, 1.0};
        ReservoirModel m = build_model(g, FeatureSchema::synthetic(5, 2));

        Rng state_rng(1000 + seed);
        auto s1 = zero_state(m);
        auto s2 = zero_state(m);
        for (auto& layer : s2)
            for (Eigen::Index i = 0; i < layer.size(); ++i)
                layer[i] = state_rng.uniform(-1.0, 1.0);

        Rng input_rng(2000 + seed);
        for (int t = 0; t < 100; ++t) {
            Eigen::VectorXd u(5);
            for (Eigen::Index i = 0; i < 5; ++i) u[i] = 2.0 * input_rng.normal();
            s1 = advance(m, s1, u);
            s2 = advance(m, s2, u);
        }
        double gap = 0.0;
        for (std::size_t l = 0; l < s1.size(); ++l)
            gap = std::max(gap, (s1[l] - s2[l]).cwiseAbs().maxCoeff());
        CHECK(gap < 1e-6);
    }
}

TEST_CASE("single-shot encoding is a leak-free sweep that ignores recurrence") {
    ReservoirModel m = scalar_chain(2, Activation::identity, 0.5);  // leak must not matter
    m.weights.input_matrix = mat1(2.0);
    m.weights.inter_layer[1] = mat1(3.0);
    m.weights.biases[0] = vec1(0.5);
    m.weights.biases[1] = vec1(-1.0);
    m.weights.recurrent[0] = mat1(7.0);  // would blow up if recurrence leaked in
    m.weights.recurrent[1] = mat1(7.0);
    const Eigen::VectorXd h = encode(m, vec1(1.0));
    REQUIRE(h.size() == 2);
    CHECK(h[0] == 2.5);        // 2*1 + 0.5
    CHECK(h[1] == 3 * 2.5 - 1);  // 3*h0 - 1
}

TEST_CASE("single-shot encoding applies each layer's own activation") {
    ReservoirModel m = scalar_chain(2, Activation::identity, 1.0);
    m.genome.activations = {Activation::tanh_fn, Activation::gaussian};
    m.weights.input_matrix = mat1(2.0);
    m.weights.inter_layer[1] = mat1(3.0);
    m.weights.biases[0] = vec1(0.5);
    m.weights.biases[1] = vec1(-1.0);
    const Eigen::VectorXd h = encode(m, vec1(1.0));
    const double h0 = std::tanh(2.5);
    CHECK(h[0] == doctest::Approx(h0).epsilon(1e-15));
    CHECK(h[1] == doctest::Approx(std::exp(-(3 * h0 - 1) * (3 * h0 - 1))).epsilon(1e-15));
}

TEST_CASE("single-shot encoding includes skip connections") {
    ReservoirModel m = scalar_chain(3, Activation::identity, 1.0);
    m.genome.inter_layer_skips = {{0, 2}};
    m.weights.skip = {mat1(10.0)};
    const Eigen::VectorXd h = encode(m, vec1(2.0));
    CHECK(h[2] == 2.0 + 20.0);
}

TEST_CASE("sequence encoding runs the leaky update from a zero state") {
    ReservoirGenome g = ReservoirGenome::defaults({6, 4}, 17);
    ReservoirModel m = build_model(g, FeatureSchema::synthetic(3, 2), EncodeMode::sequence, 3);
    Eigen::VectorXd u(3);
    u << 0.3, -0.2, 0.9;

    auto state = zero_state(m);
    for (int t = 0; t < 3; ++t) state = advance(m, state, u);
    Eigen::VectorXd expected(10);
    expected << state[0], state[1];
    CHECK(encode(m, u) == expected);

    // One step of sequence encoding is exactly one advance.
    m.encode_steps = 1;
    state = advance(m, zero_state(m), u);
    expected << state[0], state[1];
    CHECK(encode(m, u) == expected);
}

TEST_CASE("encode_matrix stacks per-record encodings") {
    ReservoirGenome g = ReservoirGenome::defaults({5}, 3);
    ReservoirModel m = build_model(g, FeatureSchema::synthetic(2, 2));
    FlowDataset ds;
    ds.schema = m.schema;
    for (int i = 0; i < 4; ++i) {
        FlowRecord r;
        r.features = Eigen::VectorXd::Constant(2, 0.1 * i);
        r.label = i % 2;
        ds.records.push_back(std::move(r));
    }
    const Eigen::MatrixXd h = encode_matrix(m, ds);
    CHECK(h.rows() == 4);
    CHECK(h.cols() == 5);
    CHECK(h.row(2).transpose() == encode(m, ds.records[2].features));
}

TEST_CASE("ridge readout matches an independent normal-equations solve") {
    for (std::uint64_t seed : {10ull, 11ull, 12ull}) {
        const Eigen::MatrixXd h = random_matrix(10, 5, seed);
        Rng rng(seed + 100);
        std::vector<int> labels;
        for (int i = 0; i < 10; ++i) labels.push_back(static_cast<int>(rng.below(3)));
        const double c = 0.7;
        const ReadoutModel fitted = fit_readout(h, labels, 3, c, ReadoutMode::ridge);

        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(10, 3);
        for (int i = 0; i < 10; ++i) t(i, labels[static_cast<std::size_t>(i)]) = 1.0;
        const Eigen::MatrixXd a =
            Eigen::MatrixXd::Identity(5, 5) / c + h.transpose() * h;
        const Eigen::MatrixXd oracle = solve_gauss(a, h.transpose() * t);
        CHECK((fitted.beta - oracle).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("weak regularization converges to the pseudoinverse solution") {
    const Eigen::MatrixXd h = random_matrix(10, 5, 42);
    Rng rng(1);
    std::vector<int> labels;
    for (int i = 0; i < 10; ++i) labels.push_back(static_cast<int>(rng.below(3)));
    const ReadoutModel ridge = fit_readout(h, labels, 3, 1e12, ReadoutMode::ridge);
    const ReadoutModel pinv = fit_readout(h, labels, 3, 1.0, ReadoutMode::pseudoinverse);
    CHECK((ridge.beta - pinv.beta).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("the pseudoinverse readout stays finite on rank-deficient activations") {
    Eigen::MatrixXd h = random_matrix(8, 4, 7);
    h.col(3) = h.col(1);  // exact linear dependence
    std::vector<int> labels = {0, 1, 0, 1, 0, 1, 0, 1};
    const ReadoutModel fitted = fit_readout(h, labels, 2, 1.0, ReadoutMode::pseudoinverse);
    CHECK(fitted.beta.allFinite());
    // The least-squares normal equations still hold.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(8, 2);
    for (int i = 0; i < 8; ++i) t(i, labels[static_cast<std::size_t>(i)]) = 1.0;
    const Eigen::MatrixXd residual = h.transpose() * (h * fitted.beta - t);
    CHECK(residual.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit_readout rejects bad inputs") {
    const Eigen::MatrixXd h = random_matrix(4, 3, 2);
    CHECK_THROWS_AS(fit_readout(h, {0, 1}, 2, 1.0, ReadoutMode::ridge), DimensionMismatch);
    CHECK_THROWS_AS(fit_readout(h, {0, 1, 2, 5}, 3, 1.0, ReadoutMode::ridge), LabelOutOfRange);
    CHECK_THROWS_AS(fit_readout(h, {0, 1, 0, 1}, 2, 0.0, ReadoutMode::ridge), ConfigError);
    CHECK_THROWS_AS(fit_readout(h, {0, 1, 0, 1}, 2, 1.0, ReadoutMode::random), ConfigError);
    CHECK_THROWS_AS(fit_readout(Eigen::MatrixXd(0, 3), {}, 2, 1.0, ReadoutMode::ridge),
                    InsufficientRows);
}

TEST_CASE("random readouts are seeded and bounded") {
    const ReadoutModel a = random_readout(6, 3, 9);
    const ReadoutModel b = random_readout(6, 3, 9);
    const ReadoutModel c = random_readout(6, 3, 10);
    CHECK(a.beta == b.beta);
    CHECK(a.beta != c.beta);
    CHECK(a.beta.rows() == 6);
    CHECK(a.beta.cols() == 3);
    CHECK(a.beta.cwiseAbs().maxCoeff() < 1.0);
    CHECK(a.mode == ReadoutMode::random);
}

TEST_CASE("softmax is shift-stable and sums to one") {
    Eigen::VectorXd z(2);
    z << 0.0, 0.0;
    CHECK(softmax(z) == Eigen::VectorXd::Constant(2, 0.5));
    z << 1000.0, 0.0;
    const Eigen::VectorXd p = softmax(z);
    CHECK(p.allFinite());
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[0] > 0.999);
}

TEST_CASE("prediction ties break toward the lowest category id") {
    ReservoirModel m = scalar_chain(1, Activation::identity, 1.0);
    ReadoutModel readout;
    readout.beta = Eigen::MatrixXd::Zero(1, 3);  // all scores identical
    m.readout = readout;
    const Prediction p = predict_normalized(m, vec1(0.4));
    CHECK(p.category == 0);
    CHECK(p.probabilities == Eigen::VectorXd::Constant(3, 1.0 / 3.0));
}

TEST_CASE("predict normalizes raw flows with the stored statistics") {
    ReservoirModel m = scalar_chain(1, Activation::tanh_fn, 1.0);
    ReadoutModel readout;
    readout.beta = random_matrix(1, 2, 3);
    m.readout = readout;
    m.norm_stats.mean = {10.0};
    m.norm_stats.stddev = {2.0};
    const Prediction raw = predict(m, vec1(11.0));
    const Prediction normalized = predict_normalized(m, vec1(0.5));
    CHECK(raw.scores == normalized.scores);
    CHECK_THROWS_AS(predict(m, Eigen::VectorXd::Zero(2)), DimensionMismatch);
}

TEST_CASE("prediction guards: untrained model, missing statistics") {
    ReservoirModel m = scalar_chain(1, Activation::tanh_fn, 1.0);
    CHECK_THROWS_AS(predict_normalized(m, vec1(0.0)), UntrainedModel);
    ReadoutModel readout;
    readout.beta = Eigen::MatrixXd::Zero(1, 2);
    m.readout = readout;
    CHECK_THROWS_AS(predict(m, vec1(0.0)), ComputeError);
}

TEST_CASE("a trained readout separates well-spaced clusters") {
    SynthSpec spec;
    spec.n_per_class = 60;
    spec.n_features = 8;
    spec.n_informative = 4;
    spec.class_count = 3;
    spec.separation = 8.0;
    spec.seed = 404;
    const auto [normalized, stats] = fit_normalize(synth_generate(spec));
    const SplitResult split = stratified_split(normalized, {0.7, 0.15, 0.15}, 404);

    ReservoirModel m = build_model(ReservoirGenome::defaults({10, 8}, 42), normalized.schema);
    train_readout(m, split.train, 1.0, ReadoutMode::ridge);
    REQUIRE(m.readout.has_value());
    CHECK(m.norm_stats.mean == stats.mean);  // stats travel with the model

    std::size_t correct = 0;
    for (const auto& rec : split.test.records) {
        if (predict_normalized(m, rec.features).category == rec.label) ++correct;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(split.test.size()) > 0.85);
}

TEST_CASE("build_model validates encode steps and sizes up its state") {
    const ReservoirGenome g = ReservoirGenome::defaults({7, 3}, 1);
    CHECK_THROWS_AS(build_model(g, FeatureSchema::synthetic(2, 2), EncodeMode::sequence, 0),
                    ConfigError);
    const ReservoirModel m = build_model(g, FeatureSchema::synthetic(2, 2));
    CHECK(m.state_size() == 10);
    CHECK(m.n_inputs() == 2);
    CHECK(encode(m, Eigen::VectorXd::Zero(2)).size() == 10);
    CHECK_THROWS_AS(encode(m, Eigen::VectorXd::Zero(3)), DimensionMismatch);
}

TEST_CASE("encode mode names round-trip") {
    CHECK(encode_mode_from_name("single_shot") == EncodeMode::single_shot);
    CHECK(encode_mode_from_name("sequence") == EncodeMode::sequence);
    CHECK(encode_mode_name(EncodeMode::sequence) == "sequence");
    CHECK_THROWS_AS(encode_mode_from_name("loop"), ConfigError);
}

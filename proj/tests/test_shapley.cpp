#include <doctest.h>

#include <cmath>
#include <vector>

#include "wannflow/csv.hpp"
#include "wannflow/dataset.hpp"
#include "wannflow/errors.hpp"
#include "wannflow/rng.hpp"
#include "wannflow/shapley.hpp"

using namespace wannflow;

namespace {

BackgroundSet random_background(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    Rng rng(seed);
    BackgroundSet bg;
    bg.samples.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) bg.samples(i, j) = rng.uniform(-2.0, 2.0);
    bg.origin = "test fixture";
    return bg;
}

Eigen::VectorXd make_x(std::initializer_list<double> values) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) x[i++] = v;
    return x;
}

std::vector<int> range_indices(int n) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) idx.push_back(i);
    return idx;
}

// A deliberately non-additive function with interactions across coordinates.
double tangled(const Eigen::VectorXd& v) {
    double out = std::sin(v[0]) * v[1] + 0.5 * v[0];
    if (v.size() > 2) out += v[2] * v[2] + 0.3 * v[0] * v[2];
    for (Eigen::Index i = 3; i < v.size(); ++i) out += 0.1 * static_cast<double>(i) * v[i];
    return out;
}

ShapleyExplanation fake_explanation(std::vector<std::string> names,
                                    std::initializer_list<double> phi) {
    ShapleyExplanation e;
    e.feature_names = std::move(names);
    e.phi = make_x(phi);
    e.active_features = range_indices(static_cast<int>(e.feature_names.size()));
    e.instance = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(e.feature_names.size()));
    return e;
}

ReservoirModel toy_model(std::uint64_t seed) {
    SynthSpec spec;
    spec.n_per_class = 30;
    spec.n_features = 4;
    spec.n_informative = 2;
    spec.class_count = 3;
    spec.separation = 6.0;
    spec.seed = seed;
    const auto [normalized, stats] = fit_normalize(synth_generate(spec));
    ReservoirModel m = build_model(ReservoirGenome::defaults({6, 4}, seed + 1), normalized.schema);
    train_readout(m, normalized, 1.0, ReadoutMode::ridge);
    return m;
}

}  // namespace

TEST_CASE("additive functions get their coefficients back exactly") {
    const ValueFn f = [](const Eigen::VectorXd& v) { return 3.0 * v[0] + 5.0 * v[1]; };
    const BackgroundSet bg = random_background(4, 2, 11);
    const Eigen::VectorXd x = make_x({1.2, -0.7});
    const ShapleyExplanation e = exact_shapley(f, x, bg, {0, 1});

    const double b0 = bg.samples.col(0).mean();
    const double b1 = bg.samples.col(1).mean();
    CHECK(e.phi[0] == doctest::Approx(3.0 * (x[0] - b0)).epsilon(1e-12));
    CHECK(e.phi[1] == doctest::Approx(5.0 * (x[1] - b1)).epsilon(1e-12));
    CHECK(e.base_value + e.phi.sum() == doctest::Approx(f(x)).epsilon(1e-12));
    CHECK(e.prediction == doctest::Approx(f(x)).epsilon(1e-12));
    CHECK(e.n_evaluations == 4);  // 2^2 coalition values
    CHECK(e.feature_names == std::vector<std::string>{"f0", "f1"});
}

TEST_CASE("features the function never reads get exactly zero attribution") {
    const ValueFn f = [](const Eigen::VectorXd& v) { return v[0] * v[0]; };
    const BackgroundSet bg = random_background(5, 3, 12);
    const ShapleyExplanation e = exact_shapley(f, make_x({1.5, 2.0, -3.0}), bg, {0, 1, 2});
    CHECK(e.phi[1] == 0.0);  // exactly, not approximately
    CHECK(e.phi[2] == 0.0);
    CHECK(e.phi[0] != 0.0);
}

TEST_CASE("symmetric features with identical evidence get identical attribution") {
    const ValueFn f = [](const Eigen::VectorXd& v) { return v[0] * v[1] + v[0] + v[1]; };
    BackgroundSet bg = random_background(6, 2, 13);
    bg.samples.col(1) = bg.samples.col(0);  // same background evidence
    const Eigen::VectorXd x = make_x({0.8, 0.8});  // same instance value
    const ShapleyExplanation e = exact_shapley(f, x, bg, {0, 1});
    CHECK(std::abs(e.phi[0] - e.phi[1]) < 1e-12);
}

TEST_CASE("attribution is linear in the function") {
    const ValueFn f = [](const Eigen::VectorXd& v) { return std::sin(v[0]) * v[1]; };
    const ValueFn g = [](const Eigen::VectorXd& v) { return v[1] * v[1] - 2.0 * v[0]; };
    const ValueFn sum = [&](const Eigen::VectorXd& v) { return f(v) + g(v); };
    const BackgroundSet bg = random_background(5, 2, 14);
    const Eigen::VectorXd x = make_x({0.4, -1.1});
    const ShapleyExplanation ef = exact_shapley(f, x, bg, {0, 1});
    const ShapleyExplanation eg = exact_shapley(g, x, bg, {0, 1});
    const ShapleyExplanation esum = exact_shapley(sum, x, bg, {0, 1});
    for (Eigen::Index i = 0; i < 2; ++i)
        CHECK(esum.phi[i] == doctest::Approx(ef.phi[i] + eg.phi[i]).epsilon(1e-9));
}

TEST_CASE("the two-feature attribution matches the hand-written formula") {
    const ValueFn f = [](const Eigen::VectorXd& v) { return tangled(v); };
    const BackgroundSet bg = random_background(7, 2, 15);
    const Eigen::VectorXd x = make_x({0.9, -0.6});
    const std::vector<int> active = {0, 1};

    const double v_empty = coalition_value(f, x, {}, bg, active);
    const double v0 = coalition_value(f, x, {0}, bg, active);
    const double v1 = coalition_value(f, x, {1}, bg, active);
    const double v01 = coalition_value(f, x, {0, 1}, bg, active);

    const ShapleyExplanation e = exact_shapley(f, x, bg, active);
    CHECK(e.phi[0] == doctest::Approx(0.5 * (v0 - v_empty) + 0.5 * (v01 - v1)).epsilon(1e-12));
    CHECK(e.phi[1] == doctest::Approx(0.5 * (v1 - v_empty) + 0.5 * (v01 - v0)).epsilon(1e-12));
    CHECK(e.base_value == v_empty);
    CHECK(e.prediction == v01);
}

TEST_CASE("inactive features stay pinned to the instance") {
    const ValueFn f = [](const Eigen::VectorXd& v) { return v[2]; };  // reads only feature 2
    const BackgroundSet bg = random_background(4, 3, 16);
    const Eigen::VectorXd x = make_x({1.0, 2.0, 7.0});
    const ShapleyExplanation e = exact_shapley(f, x, bg, {0, 1});
    CHECK(e.phi[0] == 0.0);
    CHECK(e.phi[1] == 0.0);
    CHECK(e.base_value == 7.0);
    CHECK(e.prediction == 7.0);
    REQUIRE(e.phi.size() == 2);  // only active features are attributed
}

TEST_CASE("exact attribution rejects malformed requests") {
    const ValueFn f = [](const Eigen::VectorXd& v) { return v.sum(); };
    const BackgroundSet bg16 = random_background(3, 16, 17);
    CHECK_THROWS_AS(exact_shapley(f, Eigen::VectorXd::Zero(16), bg16, range_indices(16)),
                    TooManyFeatures);
    const BackgroundSet bg = random_background(3, 2, 18);
    CHECK_THROWS_AS(exact_shapley(f, make_x({0.0, 0.0}), bg, {}), ConfigError);
    CHECK_THROWS_AS(exact_shapley(f, make_x({0.0, 0.0}), bg, {0, 5}), DimensionMismatch);
    CHECK_THROWS_AS(exact_shapley(f, make_x({0.0, 0.0, 0.0}), bg, {0}), DimensionMismatch);
    BackgroundSet empty;
    empty.samples.resize(0, 2);
    CHECK_THROWS_AS(exact_shapley(f, make_x({0.0, 0.0}), empty, {0}), EmptyDataset);
    CHECK_THROWS_AS(coalition_value(f, make_x({0.0, 0.0}), {1}, bg, {0}), ConfigError);
}

TEST_CASE("a permutation budget covering all orderings reproduces the exact values") {
    const ValueFn f = [](const Eigen::VectorXd& v) { return tangled(v); };
    const BackgroundSet bg = random_background(5, 3, 19);
    const Eigen::VectorXd x = make_x({0.3, 1.4, -0.8});
    const ShapleyExplanation exact = exact_shapley(f, x, bg, {0, 1, 2});
    const ShapleyExplanation sampled = sampled_shapley(f, x, bg, 6, 123);  // 3! orderings
    for (Eigen::Index i = 0; i < 3; ++i)
        CHECK(sampled.phi[i] == doctest::Approx(exact.phi[i]).epsilon(1e-12));
    CHECK(sampled.n_evaluations == 6 * 3 * 5);
    // Seed is irrelevant on the enumeration path.
    CHECK(sampled_shapley(f, x, bg, 6, 999).phi == sampled.phi);
}

TEST_CASE("Monte-Carlo attribution converges and conserves the total exactly") {
    const ValueFn f = [](const Eigen::VectorXd& v) { return tangled(v); };
    const BackgroundSet bg = random_background(6, 5, 20);
    Rng rng(21);
    Eigen::VectorXd x(5);
    for (Eigen::Index i = 0; i < 5; ++i) x[i] = rng.uniform(-1.5, 1.5);

    const ShapleyExplanation exact = exact_shapley(f, x, bg, range_indices(5));
    // 100 < 5! keeps this on the genuine Monte-Carlo path.
    const ShapleyExplanation mc = sampled_shapley(f, x, bg, 100, 7);
    for (Eigen::Index i = 0; i < 5; ++i)
        CHECK(std::abs(mc.phi[i] - exact.phi[i]) < 0.1);
    // Every permutation walk telescopes, so the efficiency identity is exact
    // for the estimator too, not just in expectation.
    CHECK(std::abs(mc.base_value + mc.phi.sum() - mc.prediction) < 1e-9);

    const ShapleyExplanation again = sampled_shapley(f, x, bg, 100, 7);
    CHECK(again.phi == mc.phi);
    const ShapleyExplanation other = sampled_shapley(f, x, bg, 100, 8);
    CHECK(other.phi != mc.phi);
    CHECK_THROWS_AS(sampled_shapley(f, x, bg, 0, 7), ConfigError);
}

TEST_CASE("evaluation counts follow the estimator's structure") {
    const ValueFn f = [](const Eigen::VectorXd& v) { return v.sum(); };
    const BackgroundSet bg5 = random_background(2, 5, 22);
    CHECK(exact_shapley(f, Eigen::VectorXd::Zero(5), bg5, range_indices(5)).n_evaluations == 32);
    const BackgroundSet bg4 = random_background(3, 4, 23);
    // 7 sampled orderings of 4 features against 3 background rows.
    CHECK(sampled_shapley(f, Eigen::VectorXd::Zero(4), bg4, 7, 1).n_evaluations == 7 * 4 * 3);
}

TEST_CASE("model wrappers attribute class probability with schema names") {
    const ReservoirModel m = toy_model(600);
    BackgroundSet bg;
    bg.samples = random_background(8, 4, 24).samples;
    bg.origin = "8 synthetic rows";
    Rng rng(25);
    Eigen::VectorXd x(4);
    for (Eigen::Index i = 0; i < 4; ++i) x[i] = rng.normal();

    const ShapleyExplanation exact = exact_shapley(m, x, bg, 1, range_indices(4));
    CHECK(exact.target_category == 1);
    CHECK(exact.feature_names == m.schema.names);
    CHECK(exact.prediction == doctest::Approx(predict_normalized(m, x).probabilities[1])
                                  .epsilon(1e-12));
    CHECK(exact.base_value + exact.phi.sum() == doctest::Approx(exact.prediction).epsilon(1e-9));

    // 24 permutations cover 4! orderings, so the sampled wrapper agrees.
    const ShapleyExplanation sampled = sampled_shapley(m, x, bg, 1, 24, 3);
    for (Eigen::Index i = 0; i < 4; ++i)
        CHECK(sampled.phi[i] == doctest::Approx(exact.phi[i]).epsilon(1e-12));

    CHECK_THROWS_AS(probability_fn(m, 3), ConfigError);
    CHECK_THROWS_AS(probability_fn(m, -1), ConfigError);
}

TEST_CASE("global importance averages absolute attributions and sorts them") {
    const std::vector<ShapleyExplanation> batch = {
        fake_explanation({"a", "b", "c"}, {0.5, -0.2, 0.1}),
        fake_explanation({"a", "b", "c"}, {-0.5, 0.4, 0.1}),
    };
    const auto ranking = global_importance(batch);
    REQUIRE(ranking.size() == 3);
    CHECK(ranking[0] == std::pair<std::string, double>{"a", 0.5});
    CHECK(ranking[1].first == "b");
    CHECK(ranking[1].second == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(ranking[2].first == "c");
    CHECK(ranking[2].second == doctest::Approx(0.1).epsilon(1e-12));

    // Equal scores fall back to alphabetical order.
    const auto tied = global_importance({fake_explanation({"z", "y"}, {0.3, 0.3})});
    CHECK(tied[0].first == "y");
    CHECK(tied[1].first == "z");

    CHECK_THROWS_AS(global_importance({}), EmptyDataset);
    CHECK_THROWS_AS(global_importance({fake_explanation({"a"}, {0.1}),
                                       fake_explanation({"b"}, {0.1})}),
                    DimensionMismatch);
}

TEST_CASE("bar export mirrors the global importance table") {
    const std::vector<ShapleyExplanation> batch = {
        fake_explanation({"a", "b"}, {0.5, -0.2}),
        fake_explanation({"a", "b"}, {-0.5, 0.4}),
    };
    const auto rows = export_plot_data(batch, PlotKind::bar);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == csv::Row{"feature", "mean_abs_phi"});
    CHECK(rows[1] == csv::Row{"a", "0.5"});
    CHECK(rows[2][0] == "b");
    CHECK(csv::parse_double(rows[2][1], "bar export") == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("beeswarm export emits one row per explanation and feature") {
    ShapleyExplanation e1 = fake_explanation({"a", "b"}, {0.5, -0.2});
    e1.instance = make_x({1.5, 2.5});
    ShapleyExplanation e2 = fake_explanation({"a", "b"}, {0.1, 0.2});
    e2.instance = make_x({-1.0, 0.0});
    const auto rows = export_plot_data({e1, e2}, PlotKind::beeswarm);
    REQUIRE(rows.size() == 1 + 4);
    CHECK(rows[0] == csv::Row{"feature", "feature_value", "phi"});
    CHECK(rows[1] == csv::Row{"a", "1.5", "0.5"});
    CHECK(rows[2] == csv::Row{"b", "2.5", "-0.2"});
    CHECK(rows[3] == csv::Row{"a", "-1", "0.1"});
}

TEST_CASE("force export covers one explanation ordered by attribution size") {
    ShapleyExplanation e = fake_explanation({"a", "b", "c"}, {0.1, -0.9, 0.4});
    e.instance = make_x({1.0, 2.0, 3.0});
    e.base_value = 0.25;
    e.prediction = -0.15;
    const auto rows = export_plot_data({e}, PlotKind::force);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == csv::Row{"base_value", "prediction", "feature", "feature_value", "phi"});
    CHECK(rows[1] == csv::Row{"0.25", "-0.15", "b", "2", "-0.9"});
    CHECK(rows[2][2] == "c");
    CHECK(rows[3][2] == "a");

    CHECK_THROWS_AS(export_plot_data({e, e}, PlotKind::force), WrongCardinality);
    CHECK_THROWS_AS(export_plot_data({}, PlotKind::bar), EmptyDataset);
}

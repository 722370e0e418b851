#include "wannflow/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "wannflow/errors.hpp"
#include "wannflow/rng.hpp"

namespace wannflow {

ValueFn probability_fn(const ReservoirModel& model, int target_category) {
    if (target_category < 0 || target_category >= model.schema.n_classes())
        throw ConfigError("target category out of range");
    return [&model, target_category](const Eigen::VectorXd& flow) {
        return predict_normalized(model, flow).probabilities[target_category];
    };
}

namespace {

constexpr std::size_t exact_feature_cap = 15;

void check_background(const BackgroundSet& background, Eigen::Index d) {
    if (background.samples.rows() < 1) throw EmptyDataset("background set");
    if (background.samples.cols() != d)
        throw DimensionMismatch("background feature count does not match the instance");
}

std::vector<int> all_features(Eigen::Index d) {
    std::vector<int> idx(static_cast<std::size_t>(d));
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

// Mean model output over hybrids: background row with x spliced in on
// `members` plus every non-active feature.
double coalition_mean(const ValueFn& model, const Eigen::VectorXd& x,
                      const std::vector<bool>& member_mask, const BackgroundSet& background,
                      const std::vector<bool>& active_mask) {
    double sum = 0.0;
    Eigen::VectorXd hybrid(x.size());
    for (Eigen::Index b = 0; b < background.samples.rows(); ++b) {
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const std::size_t ji = static_cast<std::size_t>(j);
            const bool from_x = !active_mask[ji] || member_mask[ji];
            hybrid[j] = from_x ? x[j] : background.samples(b, j);
        }
        sum += model(hybrid);
    }
    return sum / static_cast<double>(background.samples.rows());
}

std::vector<bool> make_mask(Eigen::Index d, const std::vector<int>& indices) {
    std::vector<bool> mask(static_cast<std::size_t>(d), false);
    for (int i : indices) {
        if (i < 0 || i >= d) throw DimensionMismatch("feature index out of range");
        mask[static_cast<std::size_t>(i)] = true;
    }
    return mask;
}

// Running compensated (Kahan) sum.
struct Kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

std::vector<std::string> default_names(const std::vector<int>& active) {
    std::vector<std::string> names;
    names.reserve(active.size());
    for (int i : active) names.push_back("f" + std::to_string(i));
    return names;
}

}  // namespace

double coalition_value(const ValueFn& model, const Eigen::VectorXd& x, const std::vector<int>& s,
                       const BackgroundSet& background, const std::vector<int>& active_features) {
    check_background(background, x.size());
    const std::vector<bool> active_mask = make_mask(x.size(), active_features);
    const std::vector<bool> member_mask = make_mask(x.size(), s);
    for (int i : s) {
        if (!active_mask[static_cast<std::size_t>(i)])
            throw ConfigError("coalition member " + std::to_string(i) + " is not active");
    }
    return coalition_mean(model, x, member_mask, background, active_mask);
}

ShapleyExplanation exact_shapley(const ValueFn& model, const Eigen::VectorXd& x,
                                 const BackgroundSet& background,
                                 const std::vector<int>& active_features) {
    check_background(background, x.size());
    const std::size_t m = active_features.size();
    if (m > exact_feature_cap) throw TooManyFeatures(m, exact_feature_cap);
    if (m == 0) throw ConfigError("exact_shapley needs at least one active feature");
    const std::vector<bool> active_mask = make_mask(x.size(), active_features);

    // Value of every coalition, indexed by bitmask over active_features.
    const std::size_t n_masks = std::size_t{1} << m;
    std::vector<double> value(n_masks);
    std::vector<bool> member_mask(static_cast<std::size_t>(x.size()));
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        std::fill(member_mask.begin(), member_mask.end(), false);
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (std::size_t{1} << i))
                member_mask[static_cast<std::size_t>(active_features[i])] = true;
        value[mask] = coalition_mean(model, x, member_mask, background, active_mask);
    }

    // phi_i = sum over S not containing i of |S|!(M-|S|-1)!/M! * (v(S+i) - v(S)).
    std::vector<double> factorial(m + 1, 1.0);
    for (std::size_t i = 1; i <= m; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);
    std::vector<double> weight(m);  // by |S|
    for (std::size_t s = 0; s < m; ++s)
        weight[s] = factorial[s] * factorial[m - s - 1] / factorial[m];

    ShapleyExplanation out;
    out.instance = x;
    out.active_features = active_features;
    out.phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        Kahan acc;
        const std::size_t bit = std::size_t{1} << i;
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const std::size_t size = static_cast<std::size_t>(std::popcount(mask));
            acc.add(weight[size] * (value[mask | bit] - value[mask]));
        }
        out.phi[static_cast<Eigen::Index>(i)] = acc.sum;
    }
    out.base_value = value[0];
    out.prediction = value[n_masks - 1];
    out.n_evaluations = static_cast<std::int64_t>(n_masks);
    out.feature_names = default_names(active_features);
    return out;
}

ShapleyExplanation sampled_shapley(const ValueFn& model, const Eigen::VectorXd& x,
                                   const BackgroundSet& background, int n_permutations,
                                   std::uint64_t seed) {
    check_background(background, x.size());
    if (n_permutations < 1) throw ConfigError("n_permutations must be at least 1");
    const std::vector<int> active = all_features(x.size());
    const std::size_t m = active.size();
    const std::vector<bool> active_mask(m, true);

    // If the permutation budget covers every distinct ordering, enumerate all
    // of them once; the estimator then coincides with the exact value.
    double m_factorial = 1.0;
    for (std::size_t i = 2; i <= m; ++i) m_factorial *= static_cast<double>(i);
    const bool enumerate_all =
        m <= 8 && static_cast<double>(n_permutations) >= m_factorial;

    ShapleyExplanation out;
    out.instance = x;
    out.active_features = active;
    out.feature_names = default_names(active);

    std::vector<Kahan> phi(m);
    std::vector<bool> member_mask(m, false);
    std::size_t n_orderings = 0;

    const auto walk = [&](const std::vector<std::size_t>& order) {
        std::fill(member_mask.begin(), member_mask.end(), false);
        double prev = out.base_value;
        for (std::size_t pos = 0; pos < m; ++pos) {
            const std::size_t i = order[pos];
            member_mask[i] = true;
            const double cur = coalition_mean(model, x, member_mask, background, active_mask);
            phi[i].add(cur - prev);
            prev = cur;
        }
        ++n_orderings;
    };

    {
        const std::vector<bool> empty_mask(m, false);
        out.base_value = coalition_mean(model, x, empty_mask, background, active_mask);
    }

    if (enumerate_all) {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        do {
            walk(order);
        } while (std::next_permutation(order.begin(), order.end()));
    } else {
        for (int p = 0; p < n_permutations; ++p) {
            Rng rng(derive_seed(seed, 0x5045524dull, static_cast<std::uint64_t>(p)));  // "PERM"
            walk(random_permutation(m, rng));
        }
    }

    out.phi = Eigen::VectorXd(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
        out.phi[static_cast<Eigen::Index>(i)] = phi[i].sum / static_cast<double>(n_orderings);
    out.prediction = model(x);
    out.n_evaluations = static_cast<std::int64_t>(n_orderings) *
                        static_cast<std::int64_t>(m) * background.samples.rows();
    return out;
}

ShapleyExplanation exact_shapley(const ReservoirModel& model, const Eigen::VectorXd& x,
                                 const BackgroundSet& background, int target_category,
                                 const std::vector<int>& active_features) {
    ShapleyExplanation out = exact_shapley(probability_fn(model, target_category), x, background,
                                           active_features);
    out.target_category = target_category;
    out.feature_names.clear();
    for (int i : out.active_features)
        out.feature_names.push_back(model.schema.names[static_cast<std::size_t>(i)]);
    return out;
}

ShapleyExplanation sampled_shapley(const ReservoirModel& model, const Eigen::VectorXd& x,
                                   const BackgroundSet& background, int target_category,
                                   int n_permutations, std::uint64_t seed) {
    ShapleyExplanation out = sampled_shapley(probability_fn(model, target_category), x, background,
                                             n_permutations, seed);
    out.target_category = target_category;
    out.feature_names.clear();
    for (int i : out.active_features)
        out.feature_names.push_back(model.schema.names[static_cast<std::size_t>(i)]);
    return out;
}

std::vector<std::pair<std::string, double>> global_importance(
    const std::vector<ShapleyExplanation>& explanations) {
    if (explanations.empty()) throw EmptyDataset("global_importance");
    const auto& names = explanations.front().feature_names;
    std::vector<double> sums(names.size(), 0.0);
    for (const auto& e : explanations) {
        if (e.feature_names != names)
            throw DimensionMismatch("explanations cover different feature sets");
        for (std::size_t i = 0; i < names.size(); ++i)
            sums[i] += std::abs(e.phi[static_cast<Eigen::Index>(i)]);
    }
    std::vector<std::pair<std::string, double>> ranking;
    for (std::size_t i = 0; i < names.size(); ++i)
        ranking.emplace_back(names[i], sums[i] / static_cast<double>(explanations.size()));
    std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranking;
}

std::vector<csv::Row> export_plot_data(const std::vector<ShapleyExplanation>& explanations,
                                       PlotKind kind) {
    if (explanations.empty()) throw EmptyDataset("export_plot_data");
    std::vector<csv::Row> rows;
    switch (kind) {
        case PlotKind::bar: {
            rows.push_back({"feature", "mean_abs_phi"});
            for (const auto& [name, value] : global_importance(explanations))
                rows.push_back({name, csv::format_double(value)});
            break;
        }
        case PlotKind::beeswarm: {
            rows.push_back({"feature", "feature_value", "phi"});
            for (const auto& e : explanations) {
                for (std::size_t i = 0; i < e.active_features.size(); ++i) {
                    rows.push_back(
                        {e.feature_names[i],
                         csv::format_double(e.instance[e.active_features[i]]),
                         csv::format_double(e.phi[static_cast<Eigen::Index>(i)])});
                }
            }
            break;
        }
        case PlotKind::force: {
            if (explanations.size() != 1)
                throw WrongCardinality("force export needs exactly one explanation, got " +
                                       std::to_string(explanations.size()));
            const auto& e = explanations.front();
            rows.push_back({"base_value", "prediction", "feature", "feature_value", "phi"});
            std::vector<std::size_t> order(e.active_features.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double pa = std::abs(e.phi[static_cast<Eigen::Index>(a)]);
                const double pb = std::abs(e.phi[static_cast<Eigen::Index>(b)]);
                if (pa != pb) return pa > pb;
                return e.feature_names[a] < e.feature_names[b];
            });
            for (std::size_t i : order) {
                rows.push_back({csv::format_double(e.base_value),
                                csv::format_double(e.prediction), e.feature_names[i],
                                csv::format_double(e.instance[e.active_features[i]]),
                                csv::format_double(e.phi[static_cast<Eigen::Index>(i)])});
            }
            break;
        }
    }
    return rows;
}

}  // namespace wannflow

#include "wannflow/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wannflow/errors.hpp"
#include "wannflow/rng.hpp"

namespace wannflow {

namespace {
constexpr std::uint64_t tag_eval_readout = 0x4556414cull;  // "EVAL"
constexpr std::uint64_t tag_gen0 = 0x47454e30ull;          // "GEN0"
constexpr std::uint64_t tag_offspring = 0x4f4646ull;       // "OFF"
constexpr std::uint64_t tag_parent = 0x504152ull;          // "PAR"
constexpr std::uint64_t tag_mutate = 0x4d5554ull;          // "MUT"
constexpr std::uint64_t tag_child = 0x43484c44ull;         // "CHLD"
}  // namespace

void SearchConfig::validate() const {
    if (population_size < 1) throw ConfigError("population_size must be positive");
    if (generations < 1) throw ConfigError("generations must be positive");
    if (shared_weight_values.empty()) throw ConfigError("shared_weight_values is empty");
    for (double w : shared_weight_values)
        if (w == 0.0) throw ConfigError("shared weight 0 would zero the whole network");
    if (elitism_count < 0 || elitism_count >= population_size)
        throw ConfigError("elitism_count must lie in [0, population_size)");
    const double rate_sum = mutation_rates.insert_node + mutation_rates.add_connection +
                            mutation_rates.change_activation;
    if (std::abs(rate_sum - 1.0) > 1e-9) throw ConfigError("mutation rates must sum to 1");
    if (mutation_rates.insert_node < 0.0 || mutation_rates.add_connection < 0.0 ||
        mutation_rates.change_activation < 0.0)
        throw ConfigError("mutation rates must be non-negative");
    if (min_layers < 1 || max_layers < min_layers)
        throw ConfigError("layer count bounds are invalid");
    if (min_layer_size < 1 || max_layer_size < min_layer_size)
        throw ConfigError("layer size bounds are invalid");
    if (!(ridge_c > 0.0)) throw ConfigError("ridge_c must be positive");
    if (encode_steps < 1) throw ConfigError("encode_steps must be at least 1");
}

namespace {

double validation_accuracy(const ReservoirModel& model, const FlowDataset& val) {
    std::size_t correct = 0;
    for (const auto& rec : val.records) {
        if (predict_normalized(model, rec.features).category == rec.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(val.size());
}

}  // namespace

EvaluatedGenome evaluate(const ReservoirGenome& genome, const FlowDataset& train,
                         const FlowDataset& val, const SearchConfig& config) {
    config.validate();
    genome.validate();
    if (val.size() == 0) throw EmptyDataset("evaluate needs a validation set");
    const std::size_t d = val.schema.n_features();
    const int k = val.schema.n_classes();

    EvaluatedGenome out;
    out.genome = genome;
    double sum = 0.0;
    double worst = 1.0;
    for (std::size_t s = 0; s < config.shared_weight_values.size(); ++s) {
        ReservoirModel model;
        model.genome = genome;
        model.schema = val.schema;
        model.encode_mode = config.encode_mode;
        model.encode_steps = config.encode_steps;
        model.weights = instantiate_shared(genome, d, config.shared_weight_values[s]);
        if (s == 0) out.complexity = model.weights.complexity();

        if (config.eval_mode == EvalMode::agnostic) {
            model.readout = random_readout(model.state_size(), k,
                                           derive_seed(genome.seed, tag_eval_readout, s));
        } else {
            if (train.size() == 0) throw EmptyDataset("readout_trained evaluation needs a training set");
            const Eigen::MatrixXd h = encode_matrix(model, train);
            model.readout = fit_readout(h, train.labels(), k, config.ridge_c, ReadoutMode::ridge);
        }
        const double acc = validation_accuracy(model, val);
        sum += acc;
        worst = std::min(worst, acc);
    }
    out.fitness_mean = sum / static_cast<double>(config.shared_weight_values.size());
    out.fitness_min = worst;
    return out;
}

namespace {

enum class Operator { insert_node, add_connection, change_activation };

bool insert_node_legal(const ReservoirGenome& g, const SearchConfig& c) {
    return std::any_of(g.layer_sizes.begin(), g.layer_sizes.end(),
                       [&](int s) { return s < c.max_layer_size; });
}

std::vector<std::pair<int, int>> missing_skips(const ReservoirGenome& g) {
    std::vector<std::pair<int, int>> missing;
    for (int from = 0; from < g.n_layers(); ++from) {
        for (int to = from + 2; to < g.n_layers(); ++to) {
            const std::pair<int, int> p{from, to};
            if (std::find(g.inter_layer_skips.begin(), g.inter_layer_skips.end(), p) ==
                g.inter_layer_skips.end())
                missing.push_back(p);
        }
    }
    return missing;
}

bool add_connection_legal(const ReservoirGenome& g) {
    return g.density < 1.0 || !missing_skips(g).empty();
}

}  // namespace

ReservoirGenome mutate(const ReservoirGenome& genome, std::uint64_t rng_seed,
                       const SearchConfig& config) {
    genome.validate();
    Rng rng(derive_seed(rng_seed, tag_mutate));

    std::vector<std::pair<Operator, double>> legal;
    if (config.mutation_rates.insert_node > 0.0 && insert_node_legal(genome, config))
        legal.emplace_back(Operator::insert_node, config.mutation_rates.insert_node);
    if (config.mutation_rates.add_connection > 0.0 && add_connection_legal(genome))
        legal.emplace_back(Operator::add_connection, config.mutation_rates.add_connection);
    if (config.mutation_rates.change_activation > 0.0 && activation_palette().size() > 1)
        legal.emplace_back(Operator::change_activation, config.mutation_rates.change_activation);
    if (legal.empty()) throw NoLegalMutation();

    double total = 0.0;
    for (const auto& [op, rate] : legal) total += rate;
    const double draw = rng.uniform() * total;
    Operator chosen = legal.back().first;
    double cum = 0.0;
    for (const auto& [op, rate] : legal) {
        cum += rate;
        if (draw < cum) {
            chosen = op;
            break;
        }
    }

    ReservoirGenome child = genome;
    child.seed = derive_seed(genome.seed, rng_seed, tag_child);

    switch (chosen) {
        case Operator::insert_node: {
            std::vector<std::size_t> growable;
            for (std::size_t i = 0; i < child.layer_sizes.size(); ++i)
                if (child.layer_sizes[i] < config.max_layer_size) growable.push_back(i);
            child.layer_sizes[rng.pick(growable)] += 1;
            break;
        }
        case Operator::add_connection: {
            const auto missing = missing_skips(child);
            const bool can_densify = child.density < 1.0;
            const bool pick_skip =
                !missing.empty() && (!can_densify || rng.uniform() < 0.5);
            if (pick_skip) {
                child.inter_layer_skips.push_back(rng.pick(missing));
                std::sort(child.inter_layer_skips.begin(), child.inter_layer_skips.end());
            } else {
                // One-connection quantum relative to the smallest recurrent mask.
                const int smallest =
                    *std::min_element(child.layer_sizes.begin(), child.layer_sizes.end());
                const double quantum =
                    1.0 / (static_cast<double>(smallest) * static_cast<double>(smallest));
                child.density = std::min(1.0, child.density + quantum);
            }
            break;
        }
        case Operator::change_activation: {
            const std::size_t layer =
                static_cast<std::size_t>(rng.below(child.activations.size()));
            std::vector<Activation> options;
            for (Activation a : activation_palette())
                if (a != child.activations[layer]) options.push_back(a);
            child.activations[layer] = rng.pick(options);
            break;
        }
    }
    child.validate();
    return child;
}

bool dominates(const EvaluatedGenome& a, const EvaluatedGenome& b) {
    const bool no_worse = a.fitness_mean >= b.fitness_mean && a.fitness_min >= b.fitness_min &&
                          a.complexity <= b.complexity;
    const bool better = a.fitness_mean > b.fitness_mean || a.fitness_min > b.fitness_min ||
                        a.complexity < b.complexity;
    return no_worse && better;
}

std::vector<EvaluatedGenome> rank(std::vector<EvaluatedGenome> population) {
    if (population.empty()) throw ConfigError("rank: empty population");
    const std::size_t n = population.size();

    // Fast non-dominated sort: domination counts plus dominated-by lists.
    std::vector<int> dominated_count(n, 0);
    std::vector<std::vector<std::size_t>> dominates_list(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(population[i], population[j])) dominates_list[i].push_back(j);
            else if (dominates(population[j], population[i])) ++dominated_count[i];
        }
    }
    std::vector<int> front_of(n, 0);
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (dominated_count[i] == 0) current.push_back(i);
    int front_index = 1;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : current) {
            front_of[i] = front_index;
            for (std::size_t j : dominates_list[i])
                if (--dominated_count[j] == 0) next.push_back(j);
        }
        current = std::move(next);
        ++front_index;
    }

    for (std::size_t i = 0; i < n; ++i) population[i].front = front_of[i];
    std::stable_sort(population.begin(), population.end(),
                     [](const EvaluatedGenome& a, const EvaluatedGenome& b) {
                         if (a.front != b.front) return a.front < b.front;
                         if (a.fitness_mean != b.fitness_mean)
                             return a.fitness_mean > b.fitness_mean;
                         if (a.complexity != b.complexity) return a.complexity < b.complexity;
                         return a.genome.seed < b.genome.seed;
                     });
    for (std::size_t i = 0; i < n; ++i) population[i].rank = static_cast<int>(i) + 1;
    return population;
}

namespace {

ReservoirGenome sample_genome(const SearchConfig& c, std::uint64_t seed) {
    Rng rng(seed);
    ReservoirGenome g;
    const int n_layers =
        c.min_layers + static_cast<int>(rng.below(
                           static_cast<std::uint64_t>(c.max_layers - c.min_layers + 1)));
    for (int i = 0; i < n_layers; ++i) {
        g.layer_sizes.push_back(
            c.min_layer_size +
            static_cast<int>(rng.below(
                static_cast<std::uint64_t>(c.max_layer_size - c.min_layer_size + 1))));
        g.leak_rates.push_back(0.5);
        g.activations.push_back(rng.pick(activation_palette()));
    }
    g.density = rng.uniform(0.5, 1.0);
    g.spectral_radius = 0.9;
    g.input_scale = 1.0;
    g.seed = derive_seed(seed, tag_child);
    g.validate();
    return g;
}

// Linear ranking selection: position p (0 = best of n) gets weight n - p.
std::size_t pick_parent(std::size_t n, Rng& rng) {
    const double total = static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
    const double draw = rng.uniform() * total;
    double cum = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        cum += static_cast<double>(n - p);
        if (draw < cum) return p;
    }
    return n - 1;
}

}  // namespace

SearchResult run_search(const FlowDataset& train, const FlowDataset& val,
                        const SearchConfig& config) {
    config.validate();

    std::vector<EvaluatedGenome> population;
    for (int i = 0; i < config.population_size; ++i) {
        const ReservoirGenome g =
            sample_genome(config, derive_seed(config.seed, tag_gen0, static_cast<std::uint64_t>(i)));
        population.push_back(evaluate(g, train, val, config));
        population.back().generation = 0;
    }
    population = rank(std::move(population));

    SearchResult result;
    const auto record = [&](int gen) {
        GenerationStats stats;
        stats.generation = gen;
        stats.best_fitness = population.front().fitness_mean;
        stats.best_complexity = population.front().complexity;
        double sum = 0.0;
        for (const auto& e : population) sum += e.fitness_mean;
        stats.mean_fitness = sum / static_cast<double>(population.size());
        result.history.push_back(stats);
    };
    record(0);

    for (int gen = 1; gen < config.generations; ++gen) {
        std::vector<EvaluatedGenome> next;
        for (int e = 0; e < config.elitism_count; ++e)
            next.push_back(population[static_cast<std::size_t>(e)]);
        Rng select_rng(derive_seed(config.seed, tag_parent, static_cast<std::uint64_t>(gen)));
        while (static_cast<int>(next.size()) < config.population_size) {
            const std::size_t parent = pick_parent(population.size(), select_rng);
            const std::uint64_t op_seed =
                derive_seed(config.seed, tag_offspring, static_cast<std::uint64_t>(gen),
                            static_cast<std::uint64_t>(next.size()));
            const ReservoirGenome child = mutate(population[parent].genome, op_seed, config);
            next.push_back(evaluate(child, train, val, config));
            next.back().generation = gen;
        }
        population = rank(std::move(next));
        record(gen);
    }

    result.best = population.front();
    result.final_population = std::move(population);
    return result;
}

}  // namespace wannflow

#pragma once

#include <cstdint>
#include <vector>

#include "wannflow/dataset.hpp"
#include "wannflow/reservoir.hpp"

namespace wannflow {

enum class EvalMode {
    agnostic,        // seeded random readout per weight sample; labels untouched
    readout_trained  // readout fit on the training split per weight sample
};

struct MutationRates {
    double insert_node = 1.0 / 3.0;
    double add_connection = 1.0 / 3.0;
    double change_activation = 1.0 / 3.0;
};

struct SearchConfig {
    int population_size = 32;
    int generations = 20;
    std::vector<double> shared_weight_values = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
    EvalMode eval_mode = EvalMode::agnostic;
    int elitism_count = 2;
    MutationRates mutation_rates;
    std::uint64_t seed = 0;
    int min_layers = 1;
    int max_layers = 4;
    int min_layer_size = 4;
    int max_layer_size = 32;
    double ridge_c = 1.0;  // readout_trained mode
    EncodeMode encode_mode = EncodeMode::single_shot;
    int encode_steps = 10;

    void validate() const;  // throws ConfigError
};

struct EvaluatedGenome {
    ReservoirGenome genome;
    double fitness_mean = 0.0;  // mean validation accuracy over weight samples
    double fitness_min = 0.0;   // worst weight sample
    std::int64_t complexity = 0;
    int rank = 0;  // 1-based position in the ranked order
    int front = 0; // 1-based non-dominated front index
    int generation = 0;
};

/// Shared-weight evaluation: for every value in the palette, rebuild the
/// genome's weights with all entries set to sign(draw) * value, attach a
/// readout per eval_mode, and score validation accuracy.  Fully determined
/// by (genome, datasets, config) — per-sample seeds derive from genome.seed.
EvaluatedGenome evaluate(const ReservoirGenome& genome, const FlowDataset& train,
                         const FlowDataset& val, const SearchConfig& config);

/// Apply exactly one mutation operator chosen by the configured rates:
/// INSERT-NODE grows one layer by a neuron, ADD-CONNECTION raises recurrent
/// density by one connection (smallest-mask quantum) or adds a layer-skipping
/// connection, CHANGE-ACTIVATION reassigns one layer's activation.  Operators
/// that would violate the bounds are excluded from the draw; the child gets a
/// fresh seed derived from (parent seed, rng_seed).
ReservoirGenome mutate(const ReservoirGenome& genome, std::uint64_t rng_seed,
                       const SearchConfig& config);

/// Non-dominated sorting on (max fitness_mean, max fitness_min, min
/// complexity); within a front: fitness_mean desc, complexity asc, seed asc.
/// Fills in rank (overall position) and front (front index), both 1-based.
std::vector<EvaluatedGenome> rank(std::vector<EvaluatedGenome> population);

/// True when a strictly improves on b in at least one objective and is no
/// worse in the others.
bool dominates(const EvaluatedGenome& a, const EvaluatedGenome& b);

struct GenerationStats {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::int64_t best_complexity = 0;
};

struct SearchResult {
    EvaluatedGenome best;
    std::vector<GenerationStats> history;
    std::vector<EvaluatedGenome> final_population;  // ranked order
};

/// Evolutionary loop: seeded uniform initial population, then elites plus
/// mutated offspring of rank-proportional parents each generation.  With
/// elitism the best fitness in history never decreases.
SearchResult run_search(const FlowDataset& train, const FlowDataset& val,
                        const SearchConfig& config);

}  // namespace wannflow

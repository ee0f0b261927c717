#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "irisct/mat.hpp"
#include "irisct/normalize.hpp"

namespace irisct {

inline constexpr int kGeneLen = 600;

/// A candidate selection mask over the 600 coarse-scale sign bits, plus its
/// evaluated objectives and their scalarization.
struct Chromosome {
    std::vector<uint8_t> genes;  // kGeneLen entries, 0 or 1
    double error_rate = 1.0;
    int n_selected = 0;
    double scalar = 1.0;
};

struct GAParams {
    int pop_size = 108;
    int gene_len = kGeneLen;
    double p_crossover = 0.65;
    double p_mutation = 0.002;
    int n_generations = 110;
    double w_err = 0.9;
    double w_count = 0.1;
    uint64_t rng_seed = 1;
};

/// Rows of feature values with one class label per row.
struct LabeledFeatures {
    MatD x;
    std::vector<int> labels;
};

/// The selection substrate: the 600 coarse-scale coefficients of the
/// two-level pyramid (coarse residual plus the four coarse directional
/// subbands, canonical order), sign-binarized to {0,1}.
std::vector<double> ga_feature_source(const Strip& strip);

/// Trains a nearest-centroid classifier on the selected columns of train
/// and scores it on valid. error_rate is the misclassification fraction;
/// scalar = w_err * error_rate + w_count * n_selected / gene_len. An empty
/// mask scores 1 without training. Throws Error{DegenerateSplit} when a
/// validation class is absent from training.
Chromosome evaluate_fitness(Chromosome c, const LabeledFeatures& train,
                            const LabeledFeatures& valid, const GAParams& params);

/// Samples one chromosome with probability proportional to
/// max_scalar + eps - scalar (low scalar preferred). All scalars must be
/// evaluated.
const Chromosome& roulette_select(const std::vector<Chromosome>& pop, std::mt19937_64& rng);

struct GAGeneration {
    int generation = 0;
    double best_scalar = 1.0;   // best-so-far
    double best_error = 1.0;
    int best_count = 0;
};

struct GAResult {
    Chromosome best;
    std::vector<GAGeneration> history;  // one row per generation
};

/// Generational GA with elitism of one, single-point crossover and per-bit
/// mutation. The data is split 70/30 per class with the seeded generator;
/// the best-ever chromosome is returned. Deterministic for a fixed seed.
GAResult run_ga(const LabeledFeatures& data, const GAParams& params = {});

} // namespace irisct

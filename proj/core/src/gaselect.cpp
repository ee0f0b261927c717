#include "irisct/gaselect.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "irisct/classify.hpp"
#include "irisct/contourlet.hpp"
#include "irisct/error.hpp"

namespace irisct {

namespace {

double unit_draw(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

void validate(const GAParams& p) {
    if (p.pop_size < 2 || p.gene_len < 1 || p.n_generations < 1)
        fail(ErrorCode::BadConfig, "population, gene length and generations must be positive");
    if (p.p_crossover < 0 || p.p_crossover > 1 || p.p_mutation < 0 || p.p_mutation > 1)
        fail(ErrorCode::BadConfig, "probabilities must lie in [0,1]");
    if (p.w_err <= 0 || p.w_count <= 0 || std::abs(p.w_err + p.w_count - 1.0) > 1e-12)
        fail(ErrorCode::BadConfig, "objective weights must be positive and sum to 1");
}

MatD select_columns(const MatD& x, const std::vector<int>& cols) {
    MatD out(x.rows, static_cast<int>(cols.size()));
    for (int r = 0; r < x.rows; ++r)
        for (size_t k = 0; k < cols.size(); ++k) out(r, static_cast<int>(k)) = x(r, cols[k]);
    return out;
}

struct SplitData {
    LabeledFeatures train, valid;
};

/// Per-class 70/30 shuffle split; every class keeps at least one training
/// row.
SplitData stratified_split(const LabeledFeatures& data, std::mt19937_64& rng) {
    std::map<int, std::vector<int>> by_class;
    for (size_t r = 0; r < data.labels.size(); ++r)
        by_class[data.labels[r]].push_back(static_cast<int>(r));

    std::vector<int> train_rows, valid_rows;
    for (auto& [cls, rows] : by_class) {
        for (size_t k = rows.size(); k > 1; --k)
            std::swap(rows[k - 1], rows[static_cast<size_t>(unit_draw(rng) * k)]);
        const size_t n_train = std::max<size_t>(1, (rows.size() * 7 + 5) / 10);
        for (size_t k = 0; k < rows.size(); ++k)
            (k < n_train ? train_rows : valid_rows).push_back(rows[k]);
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(valid_rows.begin(), valid_rows.end());

    const auto take = [&](const std::vector<int>& rows) {
        LabeledFeatures out;
        out.x = MatD(static_cast<int>(rows.size()), data.x.cols);
        for (size_t k = 0; k < rows.size(); ++k) {
            for (int c = 0; c < data.x.cols; ++c)
                out.x(static_cast<int>(k), c) = data.x(rows[k], c);
            out.labels.push_back(data.labels[rows[k]]);
        }
        return out;
    };
    return {take(train_rows), take(valid_rows)};
}

std::vector<uint8_t> random_genes(int len, std::mt19937_64& rng) {
    std::vector<uint8_t> g(len);
    for (auto& b : g) b = unit_draw(rng) < 0.5;
    return g;
}

} // namespace

std::vector<double> ga_feature_source(const Strip& strip) {
    ct::PyramidConfig cfg;
    cfg.levels = 2;
    cfg.dirs_per_level = {2, 4};
    const auto p = ct::ct_decompose(strip.data, cfg);

    std::vector<double> out;
    out.reserve(kGeneLen);
    for (double v : p.lowpass.v) out.push_back(v > 0 ? 1.0 : 0.0);
    for (const MatD& sub : p.bands[1])
        for (double v : sub.v) out.push_back(v > 0 ? 1.0 : 0.0);
    if (out.size() != kGeneLen)
        fail(ErrorCode::MalformedPyramid, "coarse-scale slice is not 600 coefficients");
    return out;
}

Chromosome evaluate_fitness(Chromosome c, const LabeledFeatures& train,
                            const LabeledFeatures& valid, const GAParams& params) {
    if (static_cast<int>(c.genes.size()) != params.gene_len)
        fail(ErrorCode::BadConfig, "gene length disagrees with the parameters");
    if (train.x.cols != params.gene_len || valid.x.cols != params.gene_len)
        fail(ErrorCode::DimMismatch, "feature dimension disagrees with the gene length");

    for (int lbl : valid.labels)
        if (std::find(train.labels.begin(), train.labels.end(), lbl) == train.labels.end())
            fail(ErrorCode::DegenerateSplit, "validation class missing from training");

    std::vector<int> cols;
    for (int k = 0; k < params.gene_len; ++k)
        if (c.genes[k]) cols.push_back(k);
    c.n_selected = static_cast<int>(cols.size());

    if (cols.empty()) {
        c.error_rate = 1.0;
        c.scalar = 1.0;
        return c;
    }

    const MatD xt = select_columns(train.x, cols);
    const MatD xv = select_columns(valid.x, cols);
    const CentroidModel model = centroid_train(xt, train.labels);

    int wrong = 0;
    for (int r = 0; r < xv.rows; ++r) {
        const std::span<const double> probe{xv.v.data() + static_cast<size_t>(r) * xv.cols,
                                            static_cast<size_t>(xv.cols)};
        wrong += centroid_predict(model, probe) != valid.labels[r];
    }
    c.error_rate = valid.labels.empty() ? 0.0 : double(wrong) / double(valid.labels.size());
    c.scalar = params.w_err * c.error_rate +
               params.w_count * double(c.n_selected) / double(params.gene_len);
    return c;
}

const Chromosome& roulette_select(const std::vector<Chromosome>& pop, std::mt19937_64& rng) {
    if (pop.empty()) fail(ErrorCode::BadConfig, "empty population");
    constexpr double kEps = 1e-9;
    double worst = pop[0].scalar;
    for (const Chromosome& c : pop) worst = std::max(worst, c.scalar);
    double total = 0;
    for (const Chromosome& c : pop) total += worst + kEps - c.scalar;
    double ticket = unit_draw(rng) * total;
    for (const Chromosome& c : pop) {
        ticket -= worst + kEps - c.scalar;
        if (ticket <= 0) return c;
    }
    return pop.back();
}

GAResult run_ga(const LabeledFeatures& data, const GAParams& params) {
    validate(params);
    if (data.x.cols != params.gene_len)
        fail(ErrorCode::DimMismatch, "feature dimension disagrees with the gene length");
    if (data.labels.size() != size_t(data.x.rows))
        fail(ErrorCode::DimMismatch, "one label per row required");

    std::mt19937_64 rng(params.rng_seed);
    const SplitData split = stratified_split(data, rng);

    // The wrapped classifier dominates runtime; identical masks recur often
    // once the population converges.
    std::map<std::vector<uint8_t>, Chromosome> cache;
    const auto evaluated = [&](Chromosome c) {
        auto it = cache.find(c.genes);
        if (it != cache.end()) return it->second;
        c = evaluate_fitness(std::move(c), split.train, split.valid, params);
        cache.emplace(c.genes, c);
        return c;
    };

    std::vector<Chromosome> pop;
    for (int k = 0; k < params.pop_size; ++k) {
        Chromosome c;
        c.genes = random_genes(params.gene_len, rng);
        pop.push_back(evaluated(std::move(c)));
    }

    const auto best_of = [](const std::vector<Chromosome>& v) {
        size_t at = 0;
        for (size_t k = 1; k < v.size(); ++k)
            if (v[k].scalar < v[at].scalar) at = k;
        return at;
    };

    GAResult result;
    result.best = pop[best_of(pop)];

    for (int gen = 0; gen < params.n_generations; ++gen) {
        std::vector<Chromosome> next;
        next.push_back(pop[best_of(pop)]);  // elitism

        while (static_cast<int>(next.size()) < params.pop_size) {
            Chromosome a = roulette_select(pop, rng);
            Chromosome b = roulette_select(pop, rng);
            if (unit_draw(rng) < params.p_crossover) {
                const int cut = 1 + static_cast<int>(unit_draw(rng) * (params.gene_len - 1));
                for (int k = cut; k < params.gene_len; ++k) std::swap(a.genes[k], b.genes[k]);
            }
            for (Chromosome* child : {&a, &b}) {
                for (auto& bit : child->genes)
                    if (unit_draw(rng) < params.p_mutation) bit ^= 1;
                if (static_cast<int>(next.size()) < params.pop_size)
                    next.push_back(evaluated(std::move(*child)));
            }
        }
        pop = std::move(next);

        const Chromosome& gen_best = pop[best_of(pop)];
        if (gen_best.scalar < result.best.scalar) result.best = gen_best;
        result.history.push_back({gen, result.best.scalar, result.best.error_rate,
                                  result.best.n_selected});
    }
    return result;
}

} // namespace irisct

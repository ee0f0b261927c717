#include "irisct/features.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include <Eigen/Dense>

#include "irisct/error.hpp"

namespace irisct {

namespace {

ct::PyramidConfig two_level_config() {
    ct::PyramidConfig cfg;
    cfg.levels = 2;
    cfg.dirs_per_level = {2, 4};
    return cfg;
}

ct::PyramidConfig three_level_config() {
    return ct::PyramidConfig{};  // 3 levels, dirs 2/4/8
}

/// Each subband flattened row-major into one row of the result.
MatD rows_from_subbands(const std::vector<MatD>& subs) {
    const int n = static_cast<int>(subs[0].size());
    MatD out(static_cast<int>(subs.size()), n);
    for (size_t d = 0; d < subs.size(); ++d) {
        if (static_cast<int>(subs[d].size()) != n)
            fail(ErrorCode::DimMismatch, "subband sizes differ");
        std::copy(subs[d].v.begin(), subs[d].v.end(), out.v.begin() + d * n);
    }
    return out;
}

/// Subbands stacked vertically, preserving their own row layout.
MatD stack_subbands(const std::vector<MatD>& subs) {
    int rows = 0;
    for (const MatD& s : subs) {
        rows += s.rows;
        if (s.cols != subs[0].cols) fail(ErrorCode::DimMismatch, "subband widths differ");
    }
    MatD out(rows, subs[0].cols);
    auto it = out.v.begin();
    for (const MatD& s : subs) it = std::copy(s.v.begin(), s.v.end(), it);
    return out;
}

MatD concat_rows(const MatD& a, const MatD& b) {
    if (a.cols != b.cols) fail(ErrorCode::DimMismatch, "matrix widths differ");
    MatD out(a.rows + b.rows, a.cols);
    std::copy(a.v.begin(), a.v.end(), out.v.begin());
    std::copy(b.v.begin(), b.v.end(), out.v.begin() + a.v.size());
    return out;
}

void check_levels(const MatI& m) {
    for (int x : m.v)
        if (x < 0 || x >= kGlcmLevels)
            fail(ErrorCode::SpecOutOfBounds, "co-occurrence input outside 0..7");
}

void count_pairs(const MatI& m, int dy, int dx, MatD& counts, long& total) {
    for (int r = 0; r < m.rows; ++r) {
        const int r2 = r + dy;
        if (r2 < 0 || r2 >= m.rows) continue;
        for (int c = 0; c < m.cols; ++c) {
            const int c2 = c + dx;
            if (c2 < 0 || c2 >= m.cols) continue;
            counts(m(r, c), m(r2, c2)) += 1.0;
            ++total;
        }
    }
}

Glcm finish_glcm(const MatD& counts, long total) {
    Glcm g;
    g.p = MatD(kGlcmLevels, kGlcmLevels);
    for (size_t i = 0; i < counts.v.size(); ++i) g.p.v[i] = counts.v[i] / total;

    std::array<double, kGlcmLevels> px{}, py{};
    for (int i = 0; i < kGlcmLevels; ++i)
        for (int j = 0; j < kGlcmLevels; ++j) {
            px[i] += g.p(i, j);
            py[j] += g.p(i, j);
        }
    for (int i = 0; i < kGlcmLevels; ++i) {
        g.mu_x += (i + 1) * px[i];
        g.mu_y += (i + 1) * py[i];
    }
    double vx = 0, vy = 0;
    for (int i = 0; i < kGlcmLevels; ++i) {
        vx += (i + 1 - g.mu_x) * (i + 1 - g.mu_x) * px[i];
        vy += (i + 1 - g.mu_y) * (i + 1 - g.mu_y) * py[i];
    }
    g.sigma_x = std::sqrt(vx);
    g.sigma_y = std::sqrt(vy);
    return g;
}

std::array<double, 7> texture_features(const MatD& m) {
    Glcm g = glcm_accumulate(quantize8(m), glcm_standard_offsets());
    return haralick7(g);
}

void append(FeatureVector& f, const std::array<double, 7>& h) {
    f.reals.insert(f.reals.end(), h.begin(), h.end());
}

/// Trit-codes one matrix: +1 at strict positive local maxima, -1 at strict
/// negative local minima over the in-bounds 8-neighborhood.
void code_extrema(const MatD& m, std::vector<int8_t>& out) {
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) {
            const double v = m(r, c);
            bool is_max = v > 0;
            bool is_min = v < 0;
            for (int dr = -1; dr <= 1 && (is_max || is_min); ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const int nr = r + dr, nc = c + dc;
                    if (nr < 0 || nr >= m.rows || nc < 0 || nc >= m.cols) continue;
                    if (m(nr, nc) >= v) is_max = false;
                    if (m(nr, nc) <= v) is_min = false;
                }
            out.push_back(is_max ? int8_t{1} : is_min ? int8_t{-1} : int8_t{0});
        }
}

void subband_stats(const MatD& s, double& mean, double& var) {
    mean = std::accumulate(s.v.begin(), s.v.end(), 0.0) / s.size();
    var = 0;
    for (double x : s.v) var += (x - mean) * (x - mean);
    var /= s.size();
}

using EMat = Eigen::MatrixXd;
using EVec = Eigen::VectorXd;

/// Deterministic standard-normal generator so fitted bases do not depend on
/// the standard library's distribution internals.
struct NormalSource {
    uint64_t state;
    explicit NormalSource(uint64_t seed) : state(seed) {}

    double uniform() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z ^= z >> 31;
        return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
    }
    double normal() {
        const double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

/// Flips each row so its largest-magnitude entry is positive; eigenvector
/// and unmixing signs are otherwise arbitrary.
void pin_row_signs(EMat& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Eigen::Index at = 0;
        m.row(r).cwiseAbs().maxCoeff(&at);
        if (m(r, at) < 0) m.row(r) = -m.row(r);
    }
}

EMat symmetric_decorrelate(const EMat& b) {
    Eigen::SelfAdjointEigenSolver<EMat> es(b * b.transpose());
    EVec d = es.eigenvalues().cwiseMax(1e-12).cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose() * b;
}

} // namespace

const char* to_string(FeatureMethod m) {
    switch (m) {
        case FeatureMethod::Glcm21: return "glcm21";
        case FeatureMethod::Glcm56: return "glcm56";
        case FeatureMethod::Local: return "local";
        case FeatureMethod::Global: return "global";
        case FeatureMethod::Combined: return "combined";
        case FeatureMethod::Binary: return "binary";
        case FeatureMethod::Nlac: return "nlac";
        case FeatureMethod::Ga600: return "ga600";
        case FeatureMethod::Aad: return "aad";
        case FeatureMethod::Pca: return "pca";
        case FeatureMethod::Ica: return "ica";
    }
    return "?";
}

std::optional<FeatureMethod> method_from_tag(std::string_view tag) {
    for (FeatureMethod m : {FeatureMethod::Glcm21, FeatureMethod::Glcm56, FeatureMethod::Local,
                            FeatureMethod::Global, FeatureMethod::Combined, FeatureMethod::Binary,
                            FeatureMethod::Nlac, FeatureMethod::Ga600, FeatureMethod::Aad,
                            FeatureMethod::Pca, FeatureMethod::Ica})
        if (tag == to_string(m)) return m;
    return std::nullopt;
}

Glcm glcm_compute(const MatI& m, int dy, int dx) {
    if (dy == 0 && dx == 0) fail(ErrorCode::SpecOutOfBounds, "zero displacement");
    check_levels(m);
    MatD counts(kGlcmLevels, kGlcmLevels);
    long total = 0;
    count_pairs(m, dy, dx, counts, total);
    if (total == 0) fail(ErrorCode::EmptyOverlap, "displacement leaves no pixel pairs");
    return finish_glcm(counts, total);
}

Glcm glcm_accumulate(const MatI& m, std::span<const std::pair<int, int>> offsets) {
    if (offsets.empty()) fail(ErrorCode::SpecOutOfBounds, "no displacements given");
    check_levels(m);
    MatD counts(kGlcmLevels, kGlcmLevels);
    long total = 0;
    for (auto [dy, dx] : offsets) {
        if (dy == 0 && dx == 0) fail(ErrorCode::SpecOutOfBounds, "zero displacement");
        count_pairs(m, dy, dx, counts, total);
    }
    if (total == 0) fail(ErrorCode::EmptyOverlap, "displacements leave no pixel pairs");
    return finish_glcm(counts, total);
}

std::span<const std::pair<int, int>> glcm_standard_offsets() {
    static const std::array<std::pair<int, int>, 3> k = {{{0, 1}, {-1, 1}, {-1, 0}}};
    return k;
}

std::array<double, 7> haralick7(const Glcm& g) {
    double energy = 0, contrast = 0, cross = 0, homogeneity = 0;
    double autocorr = 0, dissimilarity = 0;
    for (int i = 0; i < kGlcmLevels; ++i)
        for (int j = 0; j < kGlcmLevels; ++j) {
            const double p = g.p(i, j);
            const int d = i - j;
            energy += p * p;
            contrast += d * d * p;
            cross += (i + 1) * (j + 1) * p;
            homogeneity += p / (1.0 + d * d);
            dissimilarity += std::abs(d) * p;
        }
    autocorr = cross;
    const double s = g.sigma_x * g.sigma_y;
    const double correlation = s == 0 ? 0.0 : (cross - g.mu_x * g.mu_y) / s;
    return {energy, contrast, correlation, homogeneity, autocorr, dissimilarity, contrast};
}

MatI quantize8(const MatD& m) {
    for (double x : m.v)
        if (!std::isfinite(x)) fail(ErrorCode::SpecOutOfBounds, "non-finite value");
    MatI out(m.rows, m.cols);
    if (m.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(m.v.begin(), m.v.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi == lo) return out;
    const double scale = kGlcmLevels / (hi - lo);
    for (size_t i = 0; i < m.v.size(); ++i)
        out.v[i] = std::min(static_cast<int>((m.v[i] - lo) * scale), kGlcmLevels - 1);
    return out;
}

FeatureVector feat_glcm21(const Strip& strip) {
    const auto p = ct::ct_decompose(strip.data, two_level_config());
    const MatD coarse = rows_from_subbands(p.bands[1]);
    const MatD fine = stack_subbands(p.bands[0]);
    const MatD both = concat_rows(coarse, fine);

    FeatureVector f;
    f.method = FeatureMethod::Glcm21;
    append(f, texture_features(coarse));
    append(f, texture_features(fine));
    append(f, texture_features(both));
    return f;
}

FeatureVector feat_glcm56(const Strip& strip) {
    const auto p = ct::ct_decompose(strip.data, three_level_config());
    FeatureVector f;
    f.method = FeatureMethod::Glcm56;
    for (const MatD& sub : p.bands[2]) append(f, texture_features(sub));
    return f;
}

std::vector<int8_t> local_code(const ct::ContourletPyramid& p) {
    std::vector<int8_t> out;
    out.reserve(ct::coefficient_count(p));
    code_extrema(p.lowpass, out);
    for (int level = p.config.levels - 1; level >= 0; --level)
        for (const MatD& sub : p.bands[level]) code_extrema(sub, out);
    return out;
}

std::vector<int8_t> sign_code(const ct::ContourletPyramid& p) {
    const std::vector<double> flat = ct::flatten(p);
    std::vector<int8_t> out(flat.size());
    for (size_t i = 0; i < flat.size(); ++i) out[i] = flat[i] > 0 ? 1 : 0;
    return out;
}

std::vector<uint8_t> flat_coefficient_mask(const ct::ContourletPyramid& p,
                                           const MatU8& strip_mask) {
    std::vector<uint8_t> out;
    out.reserve(ct::coefficient_count(p));
    auto push = [&](const MatD& sub) {
        if (strip_mask.empty()) {
            out.insert(out.end(), sub.size(), uint8_t{1});
            return;
        }
        const MatU8 m = ct::block_and_mask(strip_mask, sub.rows, sub.cols);
        out.insert(out.end(), m.v.begin(), m.v.end());
    };
    push(p.lowpass);
    for (int level = p.config.levels - 1; level >= 0; --level)
        for (const MatD& sub : p.bands[level]) push(sub);
    return out;
}

FeatureVector feat_local(const Strip& strip) {
    const auto p = ct::ct_decompose(strip.data, two_level_config());
    FeatureVector f;
    f.method = FeatureMethod::Local;
    f.codes = local_code(p);
    f.mask = flat_coefficient_mask(p, strip.mask);
    return f;
}

FeatureVector feat_global(const Strip& strip) {
    const auto p = ct::ct_decompose(strip.data, three_level_config());
    FeatureVector f;
    f.method = FeatureMethod::Global;
    for (int level : {1, 2})
        for (const MatD& sub : p.bands[level]) {
            double mean, var;
            subband_stats(sub, mean, var);
            f.reals.push_back(mean);
            f.reals.push_back(var);
        }
    return f;
}

FeatureVector feat_combined(const Strip& strip) {
    FeatureVector f = feat_local(strip);
    f.method = FeatureMethod::Combined;
    f.reals = feat_global(strip).reals;
    return f;
}

FeatureVector feat_binary(const Strip& strip) {
    const auto p = ct::ct_decompose(strip.data, two_level_config());
    FeatureVector f;
    f.method = FeatureMethod::Binary;
    f.codes = sign_code(p);
    f.mask = flat_coefficient_mask(p, strip.mask);
    return f;
}

int nlac_count(int n_pixel) {
    return static_cast<int>(std::lround(n_pixel * 2.5 / 100.0));
}

FeatureVector feat_nlac(const Strip& strip) {
    const auto p = ct::ct_decompose(strip.data, two_level_config());
    const std::vector<double> flat = ct::flatten(p);
    const std::vector<uint8_t> valid = flat_coefficient_mask(p, strip.mask);

    const int n = nlac_count(static_cast<int>(strip.data.size()));
    if (n <= 0 || n > static_cast<int>(flat.size()))
        fail(ErrorCode::SpecOutOfBounds, "significant count outside coefficient range");

    std::vector<int32_t> order(flat.size());
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + n, order.end(),
                      [&](int32_t a, int32_t b) {
                          const double ma = std::abs(flat[a]), mb = std::abs(flat[b]);
                          return ma != mb ? ma > mb : a < b;
                      });
    order.resize(n);
    std::sort(order.begin(), order.end());

    FeatureVector f;
    f.method = FeatureMethod::Nlac;
    f.indices = std::move(order);
    f.codes.reserve(n);
    f.mask.reserve(n);
    for (int32_t idx : f.indices) {
        f.codes.push_back(flat[idx] > 0 ? 1 : 0);
        f.mask.push_back(valid[idx]);
    }
    return f;
}

double average_absolute_deviation(std::span<const double> block) {
    if (block.empty()) return 0.0;
    const double mean = std::accumulate(block.begin(), block.end(), 0.0) / block.size();
    double dev = 0;
    for (double x : block) dev += std::abs(x - mean);
    return dev / block.size();
}

FeatureVector feat_aad(const Strip& strip) {
    constexpr int kBlock = 12;
    const auto at = ct::atrous_decompose(strip.data, 3);
    const std::vector<MatD> dirs = ct::nsdfb_decompose(at.bands[2], 8);

    FeatureVector f;
    f.method = FeatureMethod::Aad;
    for (const MatD& resp : dirs) {
        if (resp.size() % kBlock != 0)
            fail(ErrorCode::DimMismatch, "response size not a multiple of the block size");
        for (size_t at_block = 0; at_block < resp.size(); at_block += kBlock)
            f.reals.push_back(average_absolute_deviation(
                std::span<const double>(resp.v.data() + at_block, kBlock)));
    }
    return f;
}

ProjectionBasis fit_projection(const std::vector<std::vector<double>>& training,
                               ProjectionBasis::Kind kind, int k, uint64_t seed) {
    if (training.size() < 2)
        fail(ErrorCode::InsufficientData, "need at least two training vectors");
    const size_t d = training[0].size();
    if (d == 0) fail(ErrorCode::InsufficientData, "empty training vectors");
    for (const auto& row : training)
        if (row.size() != d)
            fail(ErrorCode::InsufficientData, "training vectors have mixed dimensions");
    if (k <= 0) fail(ErrorCode::BadConfig, "component count must be positive");

    const int n = static_cast<int>(training.size());
    const int k_max = std::min<int>(static_cast<int>(d), n - 1);
    if (k > k_max) {
        std::cerr << "fit_projection: requested " << k << " components, data supports "
                  << k_max << "; clipping\n";
        k = k_max;
    }

    EMat x(n, static_cast<Eigen::Index>(d));
    for (int r = 0; r < n; ++r)
        for (size_t c = 0; c < d; ++c) x(r, c) = training[r][c];
    const EVec mean = x.colwise().mean();
    x.rowwise() -= mean.transpose();

    Eigen::SelfAdjointEigenSolver<EMat> es(x.transpose() * x / (n - 1));
    if (es.info() != Eigen::Success)
        fail(ErrorCode::InsufficientData, "covariance eigendecomposition failed");

    // Eigenvalues come back ascending; walk from the top.
    const EVec evals = es.eigenvalues();
    const double floor = std::max(evals(evals.size() - 1), 0.0) * 1e-12;

    ProjectionBasis basis;
    basis.kind = kind;
    basis.mean.assign(mean.data(), mean.data() + d);

    if (kind == ProjectionBasis::Kind::Pca) {
        EMat comps(k, static_cast<Eigen::Index>(d));
        for (int i = 0; i < k; ++i)
            comps.row(i) = es.eigenvectors().col(evals.size() - 1 - i).transpose();
        pin_row_signs(comps);
        basis.components = MatD(k, static_cast<int>(d));
        Eigen::Map<EMat>(basis.components.v.data(), d, k) = comps.transpose();
        return basis;
    }

    int rank = 0;
    while (rank < k && evals(evals.size() - 1 - rank) > floor && floor > 0) ++rank;
    if (rank == 0) fail(ErrorCode::InsufficientData, "training data has no variance");
    if (rank < k) {
        std::cerr << "fit_projection: data rank " << rank << " below requested " << k
                  << "; clipping\n";
        k = rank;
    }

    // Whitening: k x d map taking centered inputs to unit-covariance scores.
    EMat whiten(k, static_cast<Eigen::Index>(d));
    for (int i = 0; i < k; ++i) {
        const Eigen::Index col = evals.size() - 1 - i;
        whiten.row(i) = es.eigenvectors().col(col).transpose() / std::sqrt(evals(col));
    }
    const EMat z = whiten * x.transpose();  // k x n, white

    NormalSource rng(seed * 0x2545f4914f6cdd1dull + 1);
    EMat b(k, k);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) b(r, c) = rng.normal();
    b = symmetric_decorrelate(b);

    constexpr int kMaxIter = 500;
    constexpr double kTol = 1e-10;
    basis.converged = false;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        const EMat y = b * z;                       // k x n
        const EMat g = y.array().tanh().matrix();   // nonlinearity
        const EVec gp = (1.0 - g.array().square()).rowwise().mean();
        EMat b_new = g * z.transpose() / n - gp.asDiagonal() * b;
        b_new = symmetric_decorrelate(b_new);

        const double delta =
            1.0 - (b_new * b.transpose()).diagonal().cwiseAbs().minCoeff();
        b = b_new;
        if (delta < kTol) {
            basis.converged = true;
            break;
        }
    }

    EMat comps = b * whiten;
    pin_row_signs(comps);
    basis.components = MatD(k, static_cast<int>(d));
    Eigen::Map<EMat>(basis.components.v.data(), d, k) = comps.transpose();
    return basis;
}

std::vector<double> projection_input(const Strip& strip) {
    const auto p = ct::ct_decompose(strip.data, three_level_config());
    std::vector<double> out;
    for (const MatD& sub : p.bands[2]) out.insert(out.end(), sub.v.begin(), sub.v.end());
    return out;
}

FeatureVector feat_project(const Strip& strip, const ProjectionBasis& basis) {
    const std::vector<double> x = projection_input(strip);
    if (x.size() != basis.mean.size())
        fail(ErrorCode::DimMismatch, "basis dimension does not match the input");

    FeatureVector f;
    f.method = basis.kind == ProjectionBasis::Kind::Pca ? FeatureMethod::Pca
                                                        : FeatureMethod::Ica;
    f.reals.resize(basis.components.rows);
    for (int r = 0; r < basis.components.rows; ++r) {
        double s = 0;
        for (int c = 0; c < basis.components.cols; ++c)
            s += basis.components(r, c) * (x[c] - basis.mean[c]);
        f.reals[r] = s;
    }
    return f;
}

} // namespace irisct

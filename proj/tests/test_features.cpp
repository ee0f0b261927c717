#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "irisct/error.hpp"
#include "irisct/features.hpp"

using namespace irisct;

namespace {

MatD textured(int rows, int cols, uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MatD m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            double v = 0.45;
            v += 0.12 * std::sin(2 * M_PI * (3.0 * j / cols) + i);
            v += 0.08 * std::sin(2 * M_PI * (11.0 * j / cols) - 0.5 * i + u(rng) * 0.2);
            v += 0.03 * u(rng);
            m(i, j) = v;
        }
    return m;
}

Strip textured_strip(uint32_t seed) {
    return Strip{textured(8, 240, seed), MatU8(8, 240, 1)};
}

ct::PyramidConfig cfg24() {
    ct::PyramidConfig cfg;
    cfg.levels = 2;
    cfg.dirs_per_level = {2, 4};
    return cfg;
}

// ---- reference implementations, written from the definitions ----

struct RefGlcm {
    double p[8][8] = {};
    double mu_x = 0, mu_y = 0, sigma_x = 0, sigma_y = 0;
};

// Counts ordered pairs position by position, one explicit loop per offset.
RefGlcm ref_glcm(const MatI& m, std::span<const std::pair<int, int>> offsets) {
    long counts[8][8] = {};
    long total = 0;
    for (auto [dy, dx] : offsets)
        for (int r = 0; r < m.rows; ++r)
            for (int c = 0; c < m.cols; ++c) {
                int r2 = r + dy, c2 = c + dx;
                if (r2 < 0 || r2 >= m.rows || c2 < 0 || c2 >= m.cols) continue;
                ++counts[m(r, c)][m(r2, c2)];
                ++total;
            }
    REQUIRE(total > 0);
    RefGlcm g;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) g.p[i][j] = double(counts[i][j]) / double(total);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            g.mu_x += (i + 1) * g.p[i][j];
            g.mu_y += (j + 1) * g.p[i][j];
        }
    double vx = 0, vy = 0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            vx += (i + 1 - g.mu_x) * (i + 1 - g.mu_x) * g.p[i][j];
            vy += (j + 1 - g.mu_y) * (j + 1 - g.mu_y) * g.p[i][j];
        }
    g.sigma_x = std::sqrt(vx);
    g.sigma_y = std::sqrt(vy);
    return g;
}

// Feature formulas evaluated directly; contrast via difference classes and
// correlation via the centered product, distinct formulations from the
// library's single-pass accumulation.
std::array<double, 7> ref_features(const RefGlcm& g) {
    double energy = 0, homogeneity = 0, autocorr = 0, dissim = 0, inertia = 0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            energy += g.p[i][j] * g.p[i][j];
            homogeneity += g.p[i][j] / (1.0 + (i - j) * (i - j));
            autocorr += (i + 1) * (j + 1) * g.p[i][j];
            dissim += std::abs(i - j) * g.p[i][j];
            inertia += (i - j) * (i - j) * g.p[i][j];
        }
    double contrast = 0;
    for (int n = 0; n <= 7; ++n) {
        double cls = 0;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                if (std::abs(i - j) == n) cls += g.p[i][j];
        contrast += double(n) * n * cls;
    }
    double correlation = 0;
    if (g.sigma_x * g.sigma_y != 0) {
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                correlation += (i + 1 - g.mu_x) * (j + 1 - g.mu_y) * g.p[i][j];
        correlation /= g.sigma_x * g.sigma_y;
    }
    return {energy, contrast, correlation, homogeneity, autocorr, dissim, inertia};
}

// Bin membership by scanning bin edges rather than scaling.
MatI ref_quantize(const MatD& m) {
    MatI out(m.rows, m.cols);
    double lo = m.v[0], hi = m.v[0];
    for (double x : m.v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (hi == lo) return out;
    for (size_t k = 0; k < m.v.size(); ++k) {
        int bin = 0;
        for (int b = 1; b <= 7; ++b)
            if (m.v[k] >= lo + (hi - lo) * b / 8.0) bin = b;
        out.v[k] = bin;
    }
    return out;
}

std::array<double, 7> ref_texture(const MatD& m) {
    return ref_features(ref_glcm(ref_quantize(m), glcm_standard_offsets()));
}

ct::ContourletPyramid zero_pyramid_24() {
    ct::ContourletPyramid p;
    p.config = cfg24();
    p.source_rows = 8;
    p.source_cols = 240;
    p.lowpass = MatD(2, 60);
    p.bands = {{MatD(8, 120), MatD(8, 120)},
               {MatD(2, 60), MatD(2, 60), MatD(2, 60), MatD(2, 60)}};
    return p;
}

} // namespace

TEST_CASE("pair counting and statistics match a direct oracle on random inputs") {
    std::mt19937 rng(991);
    double max_p = 0, max_stat = 0, max_feat = 0;
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int rows = 1 + int(rng() % 32), cols = 1 + int(rng() % 32);
        MatI m(rows, cols);
        for (auto& v : m.v) v = int(rng() % 8);
        int dy = 0, dx = 0;
        while (dy == 0 && dx == 0) {
            dy = int(rng() % 5) - 2;
            dx = int(rng() % 5) - 2;
        }

        bool any = false;
        for (int r = 0; r < rows && !any; ++r)
            for (int c = 0; c < cols; ++c)
                if (r + dy >= 0 && r + dy < rows && c + dx >= 0 && c + dx < cols) {
                    any = true;
                    break;
                }
        if (!any) {
            CHECK_THROWS_WITH_AS(glcm_compute(m, dy, dx), doctest::Contains("EmptyOverlap"),
                                 Error);
            continue;
        }

        const Glcm got = glcm_compute(m, dy, dx);
        const std::pair<int, int> off[1] = {{dy, dx}};
        const RefGlcm want = ref_glcm(m, off);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                max_p = std::max(max_p, std::abs(got.p(i, j) - want.p[i][j]));
        max_stat = std::max({max_stat, std::abs(got.mu_x - want.mu_x),
                             std::abs(got.mu_y - want.mu_y),
                             std::abs(got.sigma_x - want.sigma_x),
                             std::abs(got.sigma_y - want.sigma_y)});

        const auto hf = haralick7(got);
        const auto rf = ref_features(want);
        for (int k = 0; k < 7; ++k) max_feat = std::max(max_feat, std::abs(hf[k] - rf[k]));
        ++checked;
    }
    CHECK(checked > 900);
    CHECK(max_p < 1e-12);
    CHECK(max_stat < 1e-12);
    CHECK(max_feat < 1e-9);
}

TEST_CASE("a single concentrated co-occurrence cell gives the textbook values") {
    MatI m(4, 4, 3);
    const Glcm g = glcm_compute(m, 0, 1);
    CHECK(g.p(3, 3) == doctest::Approx(1.0));
    const auto h = haralick7(g);
    CHECK(h[0] == doctest::Approx(1.0));   // energy
    CHECK(h[1] == doctest::Approx(0.0));   // contrast
    CHECK(h[2] == doctest::Approx(0.0));   // correlation, degenerate marginals
    CHECK(h[3] == doctest::Approx(1.0));   // homogeneity
    CHECK(h[4] == doctest::Approx(16.0));  // autocorrelation, one-based indices
    CHECK(h[5] == doctest::Approx(0.0));   // dissimilarity
    CHECK(h[6] == doctest::Approx(0.0));   // inertia
}

TEST_CASE("co-occurrence input validation") {
    MatI ok(3, 3, 2);
    MatI bad(3, 3, 2);
    bad(1, 1) = 8;
    CHECK_THROWS_WITH_AS(glcm_compute(bad, 0, 1), doctest::Contains("SpecOutOfBounds"), Error);
    bad(1, 1) = -1;
    CHECK_THROWS_WITH_AS(glcm_compute(bad, 0, 1), doctest::Contains("SpecOutOfBounds"), Error);
    CHECK_THROWS_WITH_AS(glcm_compute(ok, 0, 0), doctest::Contains("SpecOutOfBounds"), Error);
    MatI row(1, 5, 0);
    CHECK_THROWS_WITH_AS(glcm_compute(row, -1, 0), doctest::Contains("EmptyOverlap"), Error);
    CHECK_THROWS_WITH_AS(glcm_accumulate(ok, {}), doctest::Contains("SpecOutOfBounds"), Error);
}

TEST_CASE("quantize8 endpoints, spacing and degenerate input") {
    MatD two(1, 2);
    two(0, 0) = 0;
    two(0, 1) = 1;
    const MatI q2 = quantize8(two);
    CHECK(q2(0, 0) == 0);
    CHECK(q2(0, 1) == 7);

    MatD ramp(1, 8);
    for (int k = 0; k < 8; ++k) ramp(0, k) = k / 7.0;
    const MatI qr = quantize8(ramp);
    for (int k = 0; k < 8; ++k) CHECK(qr(0, k) == k);

    const MatI qc = quantize8(MatD(3, 5, 2.5));
    for (int v : qc.v) CHECK(v == 0);

    MatD neg(1, 3);
    neg(0, 0) = -4;
    neg(0, 1) = -3;
    neg(0, 2) = 4;
    const MatI qn = quantize8(neg);
    CHECK(qn(0, 0) == 0);
    CHECK(qn(0, 1) == 1);
    CHECK(qn(0, 2) == 7);

    MatD inf(1, 2);
    inf(0, 1) = INFINITY;
    CHECK_THROWS_WITH_AS(quantize8(inf), doctest::Contains("SpecOutOfBounds"), Error);
}

TEST_CASE("quantize8 agrees with edge-scanning reference on random data") {
    std::mt19937 rng(313);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        MatD m(4, 30);
        for (auto& v : m.v) v = u(rng);
        const MatI a = quantize8(m);
        const MatI b = ref_quantize(m);
        CHECK(a.v == b.v);
    }
}

TEST_CASE("published template lengths") {
    const Strip s = textured_strip(5);
    CHECK(feat_glcm21(s).reals.size() == 21);
    CHECK(feat_glcm56(s).reals.size() == 56);
    CHECK(feat_local(s).codes.size() == 2520);
    CHECK(feat_global(s).reals.size() == 24);
    const FeatureVector comb = feat_combined(s);
    CHECK(comb.codes.size() == 2520);
    CHECK(comb.reals.size() == 24);
    CHECK(comb.length() == 2544);
    const FeatureVector bin = feat_binary(s);
    CHECK(bin.codes.size() == 2520);
    CHECK(bin.mask.size() == 2520);
    const FeatureVector nl = feat_nlac(s);
    CHECK(nl.codes.size() == 48);
    CHECK(nl.indices.size() == 48);
    CHECK(feat_aad(s).reals.size() == 1280);
    CHECK(projection_input(s).size() == 120);
}

TEST_CASE("glcm21 equals an end-to-end reference recomputation") {
    const Strip s = textured_strip(17);
    const FeatureVector got = feat_glcm21(s);

    const auto p = ct::ct_decompose(s.data, cfg24());
    MatD m1(4, 120);
    for (int d = 0; d < 4; ++d)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 60; ++c) m1(d, r * 60 + c) = p.bands[1][d](r, c);
    MatD m2(16, 120);
    for (int d = 0; d < 2; ++d)
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 120; ++c) m2(d * 8 + r, c) = p.bands[0][d](r, c);
    MatD m3(20, 120);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 120; ++c) m3(r, c) = m1(r, c);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 120; ++c) m3(4 + r, c) = m2(r, c);

    const std::array<const MatD*, 3> mats = {&m1, &m2, &m3};
    REQUIRE(got.reals.size() == 21);
    for (int k = 0; k < 3; ++k) {
        const auto want = ref_texture(*mats[k]);
        for (int j = 0; j < 7; ++j)
            CHECK(got.reals[7 * k + j] == doctest::Approx(want[j]).epsilon(1e-9));
    }
}

TEST_CASE("glcm56 equals per-subband reference recomputation") {
    const Strip s = textured_strip(29);
    const FeatureVector got = feat_glcm56(s);
    const auto p = ct::ct_decompose(s.data, {});
    REQUIRE(p.bands[2].size() == 8);
    for (int d = 0; d < 8; ++d) {
        const auto want = ref_texture(p.bands[2][d]);
        for (int j = 0; j < 7; ++j)
            CHECK(got.reals[7 * d + j] == doctest::Approx(want[j]).epsilon(1e-9));
    }
}

TEST_CASE("extrema trit code flags a lone spike at its canonical position") {
    auto p = zero_pyramid_24();
    p.bands[0][1](4, 50) = 3.0;
    const std::vector<int8_t> code = local_code(p);
    REQUIRE(code.size() == 2520);
    // lowpass 120, then four coarse subbands of 120, then the first fine
    // subband of 960, then row 4 column 50 of the second.
    const size_t at = 120 + 480 + 960 + 4 * 120 + 50;
    for (size_t i = 0; i < code.size(); ++i) CHECK(code[i] == (i == at ? 1 : 0));

    p.bands[0][1](4, 50) = -3.0;
    const std::vector<int8_t> neg = local_code(p);
    CHECK(neg[at] == -1);

    // A plateau is not a strict extremum.
    p.bands[0][1](4, 51) = -3.0;
    const std::vector<int8_t> flat = local_code(p);
    CHECK(flat[at] == 0);
    CHECK(flat[at + 1] == 0);
}

TEST_CASE("trit code stays in its alphabet and marks both polarities on texture") {
    const Strip s = textured_strip(41);
    const FeatureVector f = feat_local(s);
    int pos = 0, zero = 0, negs = 0;
    for (int8_t t : f.codes) {
        REQUIRE((t == -1 || t == 0 || t == 1));
        pos += t == 1;
        zero += t == 0;
        negs += t == -1;
    }
    CHECK(pos > 0);
    CHECK(negs > 0);
    CHECK(zero > 0);
}

TEST_CASE("subband statistics vanish on a constant strip and scale quadratically") {
    Strip flat{MatD(8, 240, 0.6), MatU8(8, 240, 1)};
    for (double v : feat_global(flat).reals) CHECK(std::abs(v) < 1e-9);

    const Strip s = textured_strip(53);
    Strip doubled{s.data, s.mask};
    for (auto& v : doubled.data.v) v *= 2.0;
    const auto a = feat_global(s).reals;
    const auto b = feat_global(doubled).reals;
    REQUIRE(a.size() == 24);
    for (size_t k = 0; k < a.size(); k += 2) {
        CHECK(b[k] == doctest::Approx(2.0 * a[k]).epsilon(1e-9));          // mean
        CHECK(b[k + 1] == doctest::Approx(4.0 * a[k + 1]).epsilon(1e-9));  // variance
    }
}

TEST_CASE("combined template is the trit code followed by the statistics") {
    const Strip s = textured_strip(61);
    const FeatureVector comb = feat_combined(s);
    CHECK(comb.codes == feat_local(s).codes);
    CHECK(comb.reals == feat_global(s).reals);
}

TEST_CASE("sign code flips under negation wherever a coefficient is nonzero") {
    const Strip s = textured_strip(67);
    Strip neg{s.data, s.mask};
    for (auto& v : neg.data.v) v = -v;
    const FeatureVector a = feat_binary(s);
    const FeatureVector b = feat_binary(neg);
    const auto flat = ct::flatten(ct::ct_decompose(s.data, cfg24()));
    REQUIRE(a.codes.size() == flat.size());
    for (size_t i = 0; i < flat.size(); ++i) {
        REQUIRE((a.codes[i] == 0 || a.codes[i] == 1));
        if (std::abs(flat[i]) > 1e-12) CHECK(int(a.codes[i]) + int(b.codes[i]) == 1);
    }
}

TEST_CASE("coefficient mask follows the strip mask through block AND") {
    const Strip s = textured_strip(71);
    const auto p = ct::ct_decompose(s.data, cfg24());

    const auto all = flat_coefficient_mask(p, MatU8(8, 240, 1));
    CHECK(all.size() == 2520);
    CHECK(std::count(all.begin(), all.end(), 1) == 2520);

    MatU8 hole(8, 240, 1);
    for (int r = 0; r < 8; ++r)
        for (int c = 100; c < 140; ++c) hole(r, c) = 0;
    const auto masked = flat_coefficient_mask(p, hole);
    const size_t dropped = std::count(masked.begin(), masked.end(), 0);
    CHECK(dropped > 0);
    // A sixth of the angular extent disappears; the coefficient loss is in
    // the same ballpark across all rates.
    CHECK(dropped >= 2520 / 8);
    CHECK(dropped <= 2520 / 3);

    const auto empty_ok = flat_coefficient_mask(p, MatU8{});
    CHECK(std::count(empty_ok.begin(), empty_ok.end(), 1) == 2520);
}

TEST_CASE("significant-coefficient selection picks the magnitude top slice") {
    const Strip s = textured_strip(83);
    const FeatureVector f = feat_nlac(s);
    REQUIRE(f.indices.size() == 48);
    CHECK(std::is_sorted(f.indices.begin(), f.indices.end()));
    CHECK(std::adjacent_find(f.indices.begin(), f.indices.end()) == f.indices.end());

    const auto flat = ct::flatten(ct::ct_decompose(s.data, cfg24()));
    std::vector<char> chosen(flat.size(), 0);
    for (int32_t idx : f.indices) {
        REQUIRE(idx >= 0);
        REQUIRE(size_t(idx) < flat.size());
        chosen[idx] = 1;
    }
    double min_in = 1e300, max_out = 0;
    for (size_t i = 0; i < flat.size(); ++i) {
        if (chosen[i])
            min_in = std::min(min_in, std::abs(flat[i]));
        else
            max_out = std::max(max_out, std::abs(flat[i]));
    }
    CHECK(min_in >= max_out);
    for (size_t k = 0; k < f.indices.size(); ++k)
        CHECK(int(f.codes[k]) == (flat[f.indices[k]] > 0 ? 1 : 0));
}

TEST_CASE("significant count is a rounded 2.5 percent") {
    CHECK(nlac_count(1920) == 48);
    CHECK(nlac_count(4800) == 120);
    CHECK(nlac_count(20) == 1);   // exactly half rounds away from zero
    CHECK(nlac_count(60) == 2);
    CHECK(nlac_count(100) == 3);  // 2.5 rounds up, not to even
}

TEST_CASE("average absolute deviation arithmetic") {
    const double block[] = {0, 0, 4, 4};
    CHECK(average_absolute_deviation(block) == doctest::Approx(2.0));
    const double one[] = {7.5};
    CHECK(average_absolute_deviation(one) == doctest::Approx(0.0));
}

TEST_CASE("blockwise deviation features are nonnegative and vanish on flat input") {
    const Strip s = textured_strip(97);
    const FeatureVector f = feat_aad(s);
    REQUIRE(f.reals.size() == 1280);
    double hi = 0;
    for (double v : f.reals) {
        CHECK(v >= 0);
        hi = std::max(hi, v);
    }
    CHECK(hi > 0);

    Strip flat{MatD(8, 240, 0.3), MatU8(8, 240, 1)};
    for (double v : feat_aad(flat).reals) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("blockwise deviation features tile the directional responses in order") {
    const Strip s = textured_strip(101);
    const FeatureVector f = feat_aad(s);
    const auto at = ct::atrous_decompose(s.data, 3);
    const auto dirs = ct::nsdfb_decompose(at.bands[2], 8);
    REQUIRE(dirs.size() == 8);
    std::mt19937 rng(7);
    for (int probe = 0; probe < 40; ++probe) {
        const int d = int(rng() % 8), blk = int(rng() % 160);
        double mean = 0;
        for (int k = 0; k < 12; ++k) mean += dirs[d].v[blk * 12 + k];
        mean /= 12;
        double dev = 0;
        for (int k = 0; k < 12; ++k) dev += std::abs(dirs[d].v[blk * 12 + k] - mean);
        dev /= 12;
        CHECK(f.reals[d * 160 + blk] == doctest::Approx(dev).epsilon(1e-12));
    }
}

TEST_CASE("principal axis of collinear points is recovered exactly") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::vector<double> axis = {3, -1, 2, 0, 1, -2};
    const double norm = std::sqrt(std::inner_product(axis.begin(), axis.end(), axis.begin(), 0.0));

    std::vector<std::vector<double>> train;
    for (int i = 0; i < 40; ++i) {
        const double t = u(rng);
        std::vector<double> x(6);
        for (int k = 0; k < 6; ++k) x[k] = 0.5 + t * axis[k];
        train.push_back(x);
    }
    const ProjectionBasis basis = fit_projection(train, ProjectionBasis::Kind::Pca, 1);
    REQUIRE(basis.components.rows == 1);
    REQUIRE(basis.components.cols == 6);
    double dot = 0, len = 0;
    for (int k = 0; k < 6; ++k) {
        dot += basis.components(0, k) * axis[k] / norm;
        len += basis.components(0, k) * basis.components(0, k);
    }
    CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(len == doctest::Approx(1.0).epsilon(1e-9));
    for (int k = 0; k < 6; ++k) CHECK(basis.mean[k] == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("principal components are orthonormal and ordered by variance") {
    std::mt19937 rng(19);
    std::normal_distribution<double> nrm(0.0, 1.0);
    std::vector<std::vector<double>> train;
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x(5);
        const double a = 4 * nrm(rng), b = 2 * nrm(rng), c = nrm(rng);
        x[0] = a + 0.1 * c;
        x[1] = a - b;
        x[2] = b + c;
        x[3] = c;
        x[4] = 0.5 * a + b - c;
        train.push_back(x);
    }
    const ProjectionBasis basis = fit_projection(train, ProjectionBasis::Kind::Pca, 3);
    REQUIRE(basis.components.rows == 3);
    for (int r = 0; r < 3; ++r)
        for (int q = 0; q <= r; ++q) {
            double dot = 0;
            for (int k = 0; k < 5; ++k) dot += basis.components(r, k) * basis.components(q, k);
            CHECK(dot == doctest::Approx(r == q ? 1.0 : 0.0).epsilon(1e-9));
        }

    // Score variance must come out ordered.
    std::vector<double> var(3, 0.0);
    std::vector<double> mean_score(3, 0.0);
    for (const auto& x : train)
        for (int r = 0; r < 3; ++r) {
            double s = 0;
            for (int k = 0; k < 5; ++k) s += basis.components(r, k) * (x[k] - basis.mean[k]);
            mean_score[r] += s;
            var[r] += s * s;
        }
    for (int r = 0; r < 3; ++r) var[r] = var[r] / train.size();
    CHECK(var[0] >= var[1]);
    CHECK(var[1] >= var[2]);
}

TEST_CASE("independent sources are separated from their linear mixture") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 2000;
    std::vector<double> s1(n), s2(n);
    for (int i = 0; i < n; ++i) {
        s1[i] = u(rng);                       // sub-Gaussian
        const double v = u(rng);
        s2[i] = v * v * v * 2.0;              // super-Gaussian
    }
    std::vector<std::vector<double>> mixed;
    for (int i = 0; i < n; ++i) mixed.push_back({2 * s1[i] + s2[i], s1[i] + s2[i]});

    const ProjectionBasis basis = fit_projection(mixed, ProjectionBasis::Kind::Ica, 2, 5);
    CHECK(basis.converged);
    REQUIRE(basis.components.rows == 2);

    auto corr = [&](const std::vector<double>& y, const std::vector<double>& s) {
        double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
        double ms = std::accumulate(s.begin(), s.end(), 0.0) / n;
        double num = 0, dy = 0, ds = 0;
        for (int i = 0; i < n; ++i) {
            num += (y[i] - my) * (s[i] - ms);
            dy += (y[i] - my) * (y[i] - my);
            ds += (s[i] - ms) * (s[i] - ms);
        }
        return std::abs(num) / std::sqrt(dy * ds);
    };
    std::vector<double> y0(n), y1(n);
    for (int i = 0; i < n; ++i) {
        y0[i] = basis.components(0, 0) * (mixed[i][0] - basis.mean[0]) +
                basis.components(0, 1) * (mixed[i][1] - basis.mean[1]);
        y1[i] = basis.components(1, 0) * (mixed[i][0] - basis.mean[0]) +
                basis.components(1, 1) * (mixed[i][1] - basis.mean[1]);
    }
    const double c11 = corr(y0, s1), c12 = corr(y0, s2);
    const double c21 = corr(y1, s1), c22 = corr(y1, s2);
    const double best = std::max(std::min(c11, c22), std::min(c12, c21));
    CHECK(best > 0.95);
}

TEST_CASE("fitted bases are deterministic for a fixed seed") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> train;
    for (int i = 0; i < 60; ++i) {
        std::vector<double> x(8);
        for (auto& v : x) v = u(rng);
        train.push_back(x);
    }
    for (auto kind : {ProjectionBasis::Kind::Pca, ProjectionBasis::Kind::Ica}) {
        const ProjectionBasis a = fit_projection(train, kind, 4, 77);
        const ProjectionBasis b = fit_projection(train, kind, 4, 77);
        CHECK(a.components == b.components);
        CHECK(a.mean == b.mean);
    }
}

TEST_CASE("component count is clipped to what the data supports") {
    std::vector<std::vector<double>> train = {
        {1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 1, 0, 0}};
    const ProjectionBasis basis =
        fit_projection(train, ProjectionBasis::Kind::Pca, kProjectionDim);
    CHECK(basis.components.rows == 2);  // min(dim 5, n - 1 = 2)
}

TEST_CASE("projection input feeds the strip through the basis") {
    std::vector<std::vector<double>> train;
    for (uint32_t seed = 200; seed < 208; ++seed)
        train.push_back(projection_input(textured_strip(seed)));
    const ProjectionBasis basis = fit_projection(train, ProjectionBasis::Kind::Pca, 5);
    REQUIRE(basis.components.rows == 5);
    REQUIRE(basis.components.cols == 120);

    const Strip probe = textured_strip(203);
    const FeatureVector f = feat_project(probe, basis);
    CHECK(f.method == FeatureMethod::Pca);
    REQUIRE(f.reals.size() == 5);

    const std::vector<double> x = projection_input(probe);
    for (int r = 0; r < 5; ++r) {
        double s = 0;
        for (int k = 0; k < 120; ++k) s += basis.components(r, k) * (x[k] - basis.mean[k]);
        CHECK(f.reals[r] == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("projection fitting validates its input") {
    CHECK_THROWS_WITH_AS(fit_projection({}, ProjectionBasis::Kind::Pca, 2),
                         doctest::Contains("InsufficientData"), Error);
    CHECK_THROWS_WITH_AS(fit_projection({{1, 2}}, ProjectionBasis::Kind::Pca, 1),
                         doctest::Contains("InsufficientData"), Error);
    CHECK_THROWS_WITH_AS(fit_projection({{1, 2}, {1, 2, 3}}, ProjectionBasis::Kind::Pca, 1),
                         doctest::Contains("InsufficientData"), Error);
    CHECK_THROWS_WITH_AS(fit_projection({{1, 2}, {3, 4}}, ProjectionBasis::Kind::Pca, 0),
                         doctest::Contains("BadConfig"), Error);
    CHECK_THROWS_WITH_AS(
        fit_projection({{1, 1}, {1, 1}, {1, 1}}, ProjectionBasis::Kind::Ica, 1),
        doctest::Contains("InsufficientData"), Error);

    std::vector<std::vector<double>> train = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const ProjectionBasis basis = fit_projection(train, ProjectionBasis::Kind::Pca, 2);
    Strip s = textured_strip(1);  // projection input dim 120, basis dim 3
    CHECK_THROWS_WITH_AS(feat_project(s, basis), doctest::Contains("DimMismatch"), Error);
}

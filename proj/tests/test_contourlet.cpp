#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "irisct/contourlet.hpp"

using namespace irisct;
using namespace irisct::ct;

namespace {

MatD random_mat(int r, int c, uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MatD m(r, c);
    for (auto& v : m.v) v = u(rng);
    return m;
}

double max_abs_diff(const MatD& a, const MatD& b) {
    REQUIRE(a.same_dims(b));
    double d = 0;
    for (size_t k = 0; k < a.v.size(); ++k) d = std::max(d, std::abs(a.v[k] - b.v[k]));
    return d;
}

double energy(const MatD& m) { return sq_norm(m); }

double rel_err(const MatD& got, const MatD& want) {
    double num = 0, den = 0;
    for (size_t k = 0; k < got.v.size(); ++k) {
        double d = got.v[k] - want.v[k];
        num += d * d;
        den += want.v[k] * want.v[k];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

// Sinusoid whose wavefront normal points at angle theta from the +column
// axis, i.e. a grating "oriented" along theta + 90 degrees.
MatD oriented_sine(int n, double theta, double omega) {
    MatD m(n, n);
    double kx = omega * std::cos(theta);
    double ky = omega * std::sin(theta);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = std::sin(kx * j + ky * i + 0.7);
    return m;
}

// Smooth banded texture: random lowpass content plus mid-frequency detail,
// stand-in for a normalized iris strip.
MatD textured_strip(uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MatD m(8, 240);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 240; ++j) {
            double v = 0.45;
            v += 0.12 * std::sin(2 * M_PI * (3.0 * j / 240.0) + i);
            v += 0.08 * std::sin(2 * M_PI * (11.0 * j / 240.0) - 0.5 * i + u(rng) * 0.2);
            v += 0.03 * u(rng);
            m(i, j) = v;
        }
    }
    return m;
}

} // namespace

TEST_CASE("lp_decompose halves dimensions with ceil and reconstructs exactly") {
    for (auto [r, c] : {std::pair{8, 240}, {7, 13}, {4, 120}, {2, 60}}) {
        CAPTURE(r);
        CAPTURE(c);
        MatD x = random_mat(r, c, 77);
        auto [low, band] = lp_decompose(x);
        CHECK(low.rows == (r + 1) / 2);
        CHECK(low.cols == (c + 1) / 2);
        CHECK(band.rows == r);
        CHECK(band.cols == c);
        MatD back = lp_reconstruct(low, band);
        CHECK(max_abs_diff(back, x) < 1e-12);
    }
}

TEST_CASE("lp_decompose rejects sub-2x2 input and mismatched reconstruct dims") {
    MatD tiny(1, 10, 0.0);
    CHECK_THROWS_AS(lp_decompose(tiny), Error);
    MatD low(3, 3, 0.0), band(8, 8, 0.0);
    try {
        lp_reconstruct(low, band);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimMismatch);
    }
}

TEST_CASE("lp of zero is zero and of upsampled smooth content is small") {
    MatD zero(8, 240, 0.0);
    auto [low, band] = lp_decompose(zero);
    CHECK(energy(low) == 0.0);
    CHECK(energy(band) == 0.0);

    // Band-limited input: the synthesis-upsample of a half-size matrix.
    MatD y = random_mat(4, 120, 5);
    MatD smooth = lp_reconstruct(y, MatD(8, 240, 0.0));
    auto [low2, band2] = lp_decompose(smooth);
    CHECK(energy(band2) < 1e-3 * energy(smooth));
}

TEST_CASE("dfb critical sampling counts") {
    MatD x = random_mat(8, 240, 9);
    auto subs = dfb_decompose(x, 2);
    REQUIRE(subs.size() == 2);
    CHECK(subs[0].rows == 8);
    CHECK(subs[0].cols == 120);
    CHECK(subs[0].size() + subs[1].size() == 1920);

    MatD b2 = random_mat(4, 120, 10);
    auto subs4 = dfb_decompose(b2, 4);
    REQUIRE(subs4.size() == 4);
    size_t total4 = 0;
    for (auto& s : subs4) total4 += s.size();
    CHECK(total4 == 480);
    for (auto& s : subs4) {
        CHECK(s.rows == 2);
        CHECK(s.cols == 60);
    }

    MatD b3 = random_mat(2, 60, 11);
    auto subs8 = dfb_decompose(b3, 8);
    REQUIRE(subs8.size() == 8);
    for (auto& s : subs8) {
        CHECK(s.rows == 1);
        CHECK(s.cols == 15);
    }
}

TEST_CASE("dfb rejects unsupported direction counts") {
    MatD x = random_mat(8, 8, 12);
    for (int n : {1, 3, 16}) {
        CAPTURE(n);
        try {
            dfb_decompose(x, n);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnsupportedDirectionCount);
        }
    }
}

TEST_CASE("dfb round trip is exact across shapes and direction counts") {
    for (int n_dirs : {2, 4, 8}) {
        for (auto [r, c] : {std::pair{8, 240}, {64, 64}, {2, 60}, {6, 12}, {16, 16}}) {
            CAPTURE(n_dirs);
            CAPTURE(r);
            CAPTURE(c);
            MatD x = random_mat(r, c, static_cast<uint32_t>(100 + n_dirs + r + c));
            auto subs = dfb_decompose(x, n_dirs);
            MatD back = dfb_reconstruct(subs, r, c);
            CHECK(max_abs_diff(back, x) < 1e-10);
        }
    }
}

TEST_CASE("dfb round trip with padding for odd dimensions") {
    for (int n_dirs : {2, 4}) {
        MatD x = random_mat(5, 9, 55);
        auto subs = dfb_decompose(x, n_dirs);
        MatD back = dfb_reconstruct(subs, 5, 9);
        CHECK(max_abs_diff(back, x) < 1e-10);
    }
}

TEST_CASE("dfb reconstruct infers dims for divisible inputs") {
    MatD x = random_mat(16, 32, 66);
    for (int n_dirs : {2, 4, 8}) {
        auto subs = dfb_decompose(x, n_dirs);
        MatD back = dfb_reconstruct(subs);
        CHECK(max_abs_diff(back, x) < 1e-10);
    }
}

TEST_CASE("dfb impulse reconstructs exactly") {
    MatD x(16, 16, 0.0);
    x(7, 9) = 1.0;
    auto subs = dfb_decompose(x, 8);
    MatD back = dfb_reconstruct(subs, 16, 16);
    CHECK(max_abs_diff(back, x) < 1e-12);
}

// Wavevector angle at the center of canonical wedge d. The two-channel bank
// splits along the +-45 degree boundaries, so its wedges sit on the axes;
// the four-channel bank adds the axes as boundaries (quadrant wedges); the
// eight-channel bank splits each quadrant at tangent +-1/2 or +-2, the
// slope-uniform partition a sheared binary tree realizes.
static double wedge_center(int n_dirs, int d) {
    if (n_dirs == 2) return d * M_PI / 2.0;
    if (n_dirs == 4) return M_PI * (d + 0.5) / 4.0;
    const double t = std::atan(0.5);
    const double bounds[9] = {0.0,      t,        M_PI / 4, M_PI / 2 - t, M_PI / 2,
                              M_PI / 2 + t, 3 * M_PI / 4, M_PI - t,     M_PI};
    return 0.5 * (bounds[d] + bounds[d + 1]);
}

TEST_CASE("oriented energy concentration per direction") {
    const int n = 64;
    const double omega = 0.55 * M_PI;
    for (int n_dirs : {2, 4, 8}) {
        CAPTURE(n_dirs);
        std::vector<std::vector<double>> frac(n_dirs, std::vector<double>(n_dirs, 0.0));
        for (int d = 0; d < n_dirs; ++d) {
            MatD s = oriented_sine(n, wedge_center(n_dirs, d), omega);
            auto subs = dfb_decompose(s, n_dirs);
            double total = 0;
            for (auto& sub : subs) total += energy(sub);
            for (int k = 0; k < n_dirs; ++k) frac[d][k] = energy(subs[k]) / total;
        }
        // Diagnostic table: rows are probe angles, columns subband indices.
        std::printf("n_dirs=%d\n", n_dirs);
        for (int d = 0; d < n_dirs; ++d) {
            std::printf("  theta=%5.1f deg:", 180.0 / M_PI * wedge_center(n_dirs, d));
            for (int k = 0; k < n_dirs; ++k) std::printf(" %5.2f", frac[d][k]);
            std::printf("\n");
        }
        for (int d = 0; d < n_dirs; ++d) {
            int best = static_cast<int>(std::max_element(frac[d].begin(), frac[d].end()) -
                                        frac[d].begin());
            CHECK(best == d);
            CHECK(frac[d][d] >= 0.70);
        }
    }
}

TEST_CASE("ct coefficient budget matches the published lengths") {
    MatD x = random_mat(8, 240, 200);
    PyramidConfig two;
    two.levels = 2;
    two.dirs_per_level = {2, 4};
    auto p = ct_decompose(x, two);
    CHECK(coefficient_count(p) == 2520);
    CHECK(p.lowpass.rows == 2);
    CHECK(p.lowpass.cols == 60);
    auto flat = flatten(p);
    REQUIRE(flat.size() == 2520);
    // First 600 entries are the coarse slice: lowpass then the four
    // level-two subbands.
    size_t coarse = p.lowpass.size();
    for (const auto& sub : p.bands[1]) coarse += sub.size();
    CHECK(coarse == 600);

    PyramidConfig three;
    auto p3 = ct_decompose(x, three);
    CHECK(p3.bands[2].size() == 8);
    for (auto& s : p3.bands[2]) {
        CHECK(s.rows == 1);
        CHECK(s.cols == 15);
    }
    CHECK(coefficient_count(p3) == 2550);
}

TEST_CASE("ct round trip and zero behavior") {
    PyramidConfig cfg;
    double worst = 0;
    for (uint32_t s = 0; s < 100; ++s) {
        MatD x = random_mat(8, 240, 300 + s);
        auto p = ct_decompose(x, cfg);
        MatD back = ct_reconstruct(p);
        worst = std::max(worst, rel_err(back, x));
    }
    CHECK(worst < 1e-6);

    auto pz = ct_decompose(MatD(8, 240, 0.0), cfg);
    CHECK(energy(pz.lowpass) == 0.0);
    MatD back = ct_reconstruct(pz);
    CHECK(energy(back) == 0.0);
}

TEST_CASE("ct_decompose is linear in its input") {
    PyramidConfig cfg;
    MatD x = random_mat(8, 240, 401);
    MatD y = random_mat(8, 240, 402);
    MatD z(8, 240);
    const double a = 1.7, b = -0.6;
    for (size_t k = 0; k < z.v.size(); ++k) z.v[k] = a * x.v[k] + b * y.v[k];
    auto fx = flatten(ct_decompose(x, cfg));
    auto fy = flatten(ct_decompose(y, cfg));
    auto fz = flatten(ct_decompose(z, cfg));
    double worst = 0;
    for (size_t k = 0; k < fz.size(); ++k)
        worst = std::max(worst, std::abs(fz[k] - (a * fx[k] + b * fy[k])));
    CHECK(worst < 1e-9);
}

TEST_CASE("ct_decompose rejects too-small input") {
    try {
        ct_decompose(MatD(4, 240, 0.0), PyramidConfig{});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooSmall);
    }
}

TEST_CASE("ct_reconstruct rejects malformed pyramids") {
    auto p = ct_decompose(random_mat(8, 240, 500), PyramidConfig{});
    p.bands[1].pop_back();
    try {
        ct_reconstruct(p);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedPyramid);
    }
}

TEST_CASE("keeping the largest 48 coefficients reconstructs textured strips coarsely") {
    double worst = 0;
    for (uint32_t s = 0; s < 5; ++s) {
        MatD x = textured_strip(600 + s);
        auto p = ct_decompose(x, PyramidConfig{});
        auto flat = flatten(p);
        std::vector<size_t> idx(flat.size());
        std::iota(idx.begin(), idx.end(), size_t{0});
        std::partial_sort(idx.begin(), idx.begin() + 48, idx.end(), [&](size_t a, size_t b) {
            return std::abs(flat[a]) > std::abs(flat[b]);
        });
        std::vector<uint8_t> keep(flat.size(), 0);
        for (size_t k = 0; k < 48; ++k) keep[idx[k]] = 1;
        // Zero everything outside the kept set, preserving pyramid layout.
        size_t pos = 0;
        auto prune = [&](MatD& m) {
            for (auto& v : m.v) {
                if (!keep[pos++]) v = 0.0;
            }
        };
        prune(p.lowpass);
        for (int level = static_cast<int>(p.bands.size()) - 1; level >= 0; --level)
            for (auto& sub : p.bands[level]) prune(sub);
        MatD back = ct_reconstruct(p);
        worst = std::max(worst, rel_err(back, x));
    }
    CHECK(worst < 0.5);
}

TEST_CASE("block_and_mask ANDs source blocks") {
    MatU8 mask(4, 8, 1);
    mask(1, 3) = 0;
    MatU8 down = block_and_mask(mask, 2, 4);
    CHECK(down.rows == 2);
    CHECK(down.cols == 4);
    CHECK(down(0, 1) == 0);  // block rows 0-1, cols 2-3 contains the zero
    CHECK(down(0, 0) == 1);
    CHECK(down(1, 1) == 1);
    int zeros = 0;
    for (auto v : down.v) zeros += v == 0;
    CHECK(zeros == 1);
}

TEST_CASE("atrous bands are full rate and telescope back to the input") {
    MatD x = random_mat(8, 240, 700);
    auto p = atrous_decompose(x, 3);
    REQUIRE(p.bands.size() == 3);
    for (auto& b : p.bands) {
        CHECK(b.rows == 8);
        CHECK(b.cols == 240);
    }
    MatD sum = p.lowpass;
    for (auto& b : p.bands)
        for (size_t k = 0; k < sum.v.size(); ++k) sum.v[k] += b.v[k];
    CHECK(max_abs_diff(sum, x) < 1e-12);
}

TEST_CASE("nsdfb produces full-rate linear directional responses") {
    MatD x = random_mat(8, 240, 800);
    auto subs = nsdfb_decompose(x, 8);
    REQUIRE(subs.size() == 8);
    for (auto& s : subs) {
        CHECK(s.rows == 8);
        CHECK(s.cols == 240);
    }
    MatD y = random_mat(8, 240, 801);
    MatD z(8, 240);
    for (size_t k = 0; k < z.v.size(); ++k) z.v[k] = 2.0 * x.v[k] - 0.5 * y.v[k];
    auto sx = nsdfb_decompose(x, 8);
    auto sy = nsdfb_decompose(y, 8);
    auto sz = nsdfb_decompose(z, 8);
    double worst = 0;
    for (int d = 0; d < 8; ++d)
        for (size_t k = 0; k < sz[d].v.size(); ++k)
            worst = std::max(worst,
                             std::abs(sz[d].v[k] - (2.0 * sx[d].v[k] - 0.5 * sy[d].v[k])));
    CHECK(worst < 1e-9);

    auto zero = nsdfb_decompose(MatD(8, 240, 0.0), 4);
    for (auto& s : zero) CHECK(energy(s) == 0.0);
}

#include "irisct/contourlet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace irisct::ct {
namespace {

// Cohen-Daubechies-Feauveau 9/7 pair, DC-normalized so both polyphase
// sums are 0.5 and the pyramid reproduces constants.
const std::vector<double> kAnalysisLow = {
    0.026748757411, -0.016864118443, -0.078223266529, 0.266864118443,
    0.602949018236,
    0.266864118443, -0.078223266529, -0.016864118443, 0.026748757411};
const std::vector<double> kSynthesisLow = {
    -0.045635881557, -0.028771763114, 0.295635881557,
    0.557543526229,
    0.295635881557, -0.028771763114, -0.045635881557};

int fold_index(int i, int n, bool periodic) {
    if (n == 1) return 0;
    if (periodic) {
        i %= n;
        return i < 0 ? i + n : i;
    }
    int period = 2 * n - 2;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

// Filters along the row index (vertically).
MatD filter_vert(const MatD& x, const std::vector<double>& taps, bool periodic, int scale,
                 int spacing = 1) {
    int center = static_cast<int>(taps.size()) / 2;
    MatD out(x.rows, x.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int j = 0; j < x.cols; ++j) {
            double acc = 0.0;
            for (size_t k = 0; k < taps.size(); ++k) {
                int src = i + (static_cast<int>(k) - center) * spacing;
                acc += taps[k] * x(fold_index(src, x.rows, periodic), j);
            }
            out(i, j) = acc * scale;
        }
    }
    return out;
}

// Filters along the column index (horizontally).
MatD filter_horz(const MatD& x, const std::vector<double>& taps, bool periodic, int scale,
                 int spacing = 1) {
    int center = static_cast<int>(taps.size()) / 2;
    MatD out(x.rows, x.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int j = 0; j < x.cols; ++j) {
            double acc = 0.0;
            for (size_t k = 0; k < taps.size(); ++k) {
                int src = j + (static_cast<int>(k) - center) * spacing;
                acc += taps[k] * x(i, fold_index(src, x.cols, periodic));
            }
            out(i, j) = acc * scale;
        }
    }
    return out;
}

MatD upsample_smooth(const MatD& low, int rows, int cols, Boundary b) {
    MatD z(rows, cols);
    for (int i = 0; i < low.rows; ++i)
        for (int j = 0; j < low.cols; ++j)
            if (2 * i < rows && 2 * j < cols) z(2 * i, 2 * j) = low(i, j);
    MatD u = filter_vert(z, kSynthesisLow, b.rows_periodic, 2);
    return filter_horz(u, kSynthesisLow, b.cols_periodic, 2);
}

// ---------------------------------------------------------------------------
// Quincunx fan filter bank, lifting realization.
//
// The input is modulated by (-1)^row, which turns the diamond-shaped
// lifting passbands into the fan pair, then split into quincunx cosets.
// Cosets are packed through the unimodular shear j = 2*m + slope*i (mod C),
// so the packed array is an affine resampling of the lattice and a further
// fan split in the packed domain refines the wedge, Bamberger-Smith style.
// The slope sign picks between the two quincunx labelings.

struct FanPair {
    MatD a;
    MatD b;
};

// Detail-branch gain compensation. The predict response runs from +1 in the
// kept cone to -1 at the alias center, so the detail branch sees a passband
// gain of 2; halving restores unit gain on both outputs.
inline constexpr double detail_scale() { return 0.5; }

void modulate_rows(MatD& x) {
    for (int i = 1; i < x.rows; i += 2)
        for (int j = 0; j < x.cols; ++j) x(i, j) = -x(i, j);
}

MatD pad_to(const MatD& x, int rows, int cols) {
    if (x.rows == rows && x.cols == cols) return x;
    MatD out(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out(i, j) = x(i % x.rows, j % x.cols);
    return out;
}

MatD crop_to(const MatD& x, int rows, int cols) {
    if (x.rows == rows && x.cols == cols) return x;
    MatD out(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out(i, j) = x(i, j);
    return out;
}

// One-dimensional 5/3-style lifting split over the columns of a single row,
// used when the quincunx lattice degenerates.
FanPair line_split(const MatD& x) {
    int c2 = x.cols / 2;
    MatD a(x.rows, c2), b(x.rows, c2);
    for (int i = 0; i < x.rows; ++i) {
        for (int j = 0; j < c2; ++j) {
            a(i, j) = x(i, 2 * j);
            b(i, j) = x(i, 2 * j + 1);
        }
        for (int j = 0; j < c2; ++j)
            b(i, j) -= 0.5 * (a(i, j) + a(i, (j + 1) % c2));
        for (int j = 0; j < c2; ++j)
            a(i, j) += 0.25 * (b(i, j) + b(i, (j - 1 + c2) % c2));
        for (int j = 0; j < c2; ++j) b(i, j) *= detail_scale();
    }
    return {std::move(a), std::move(b)};
}

MatD line_merge(const FanPair& p) {
    int c2 = p.a.cols;
    MatD a = p.a, b = p.b;
    MatD x(p.a.rows, c2 * 2);
    for (int i = 0; i < x.rows; ++i) {
        for (int j = 0; j < c2; ++j) b(i, j) /= detail_scale();
        for (int j = 0; j < c2; ++j)
            a(i, j) -= 0.25 * (b(i, j) + b(i, (j - 1 + c2) % c2));
        for (int j = 0; j < c2; ++j)
            b(i, j) += 0.5 * (a(i, j) + a(i, (j + 1) % c2));
        for (int j = 0; j < c2; ++j) {
            x(i, 2 * j) = a(i, j);
            x(i, 2 * j + 1) = b(i, j);
        }
    }
    return x;
}

void split_dims_cols(int rows, int cols, int& out_rows, int& out_cols) {
    int c = cols + (cols & 1);
    int r = rows == 1 ? 1 : rows + (rows & 1);
    out_rows = r;
    out_cols = c / 2;
}

inline int wrap(int v, int n) {
    v %= n;
    return v < 0 ? v + n : v;
}

// Quincunx predict weights built by substituting the diamond kernel
// (cos w1 + cos w2)/2 into an odd-harmonic one-dimensional halfband
// (Chebyshev coefficients 1.2718, -0.3814, 0.2112, -0.1016 on harmonics
// 1, 3, 5, 7). The substitution pins the half-gain contour to the diamond
// edge |w1|+|w2| = pi at every radius, which keeps the directional wedges
// centered after modulation. All offsets have odd index sum, so the taps
// stay on the opposite coset. The update step reuses the geometry at half
// weight.
struct LiftTap {
    int di;
    int dj;
    double w;
};
const std::array<LiftTap, 64> kPredictTaps = {{
    {-7, 0, -0.0003970675592335443}, {-6, -1, -0.00277947291463481},
    {-6, 1, -0.00277947291463481},   {-5, -2, -0.008338418743904431},
    {-5, 0, -0.005038271687372874},  {-5, 2, -0.008338418743904431},
    {-4, -3, -0.01389736457317405},  {-4, -1, 0.01372126236802297},
    {-4, 1, 0.01372126236802297},    {-4, 3, -0.01389736457317405},
    {-3, -4, -0.01389736457317405},  {-3, -2, 0.04689883513848962},
    {-3, 0, 0.006563427814219433},   {-3, 2, 0.04689883513848962},
    {-3, 4, -0.01389736457317405},   {-2, -5, -0.008338418743904431},
    {-2, -3, 0.04689883513848962},   {-2, -1, -0.1072849596047876},
    {-2, 1, -0.1072849596047876},    {-2, 3, 0.04689883513848962},
    {-2, 5, -0.008338418743904431},  {-1, -6, -0.00277947291463481},
    {-1, -4, 0.01372126236802297},   {-1, -2, -0.1072849596047876},
    {-1, 0, 0.3922321480923636},     {-1, 2, -0.1072849596047876},
    {-1, 4, 0.01372126236802297},    {-1, 6, -0.00277947291463481},
    {0, -7, -0.0003970675592335443}, {0, -5, -0.005038271687372874},
    {0, -3, 0.006563427814219433},   {0, -1, 0.3922321480923636},
    {0, 1, 0.3922321480923636},      {0, 3, 0.006563427814219433},
    {0, 5, -0.005038271687372874},   {0, 7, -0.0003970675592335443},
    {1, -6, -0.00277947291463481},   {1, -4, 0.01372126236802297},
    {1, -2, -0.1072849596047876},    {1, 0, 0.3922321480923636},
    {1, 2, -0.1072849596047876},     {1, 4, 0.01372126236802297},
    {1, 6, -0.00277947291463481},    {2, -5, -0.008338418743904431},
    {2, -3, 0.04689883513848962},    {2, -1, -0.1072849596047876},
    {2, 1, -0.1072849596047876},     {2, 3, 0.04689883513848962},
    {2, 5, -0.008338418743904431},   {3, -4, -0.01389736457317405},
    {3, -2, 0.04689883513848962},    {3, 0, 0.006563427814219433},
    {3, 2, 0.04689883513848962},     {3, 4, -0.01389736457317405},
    {4, -3, -0.01389736457317405},   {4, -1, 0.01372126236802297},
    {4, 1, 0.01372126236802297},     {4, 3, -0.01389736457317405},
    {5, -2, -0.008338418743904431},  {5, 0, -0.005038271687372874},
    {5, 2, -0.008338418743904431},   {6, -1, -0.00277947291463481},
    {6, 1, -0.00277947291463481},    {7, 0, -0.0003970675592335443},
}};

// Splits into the fan pair, halving the column count. Output rows may gain
// one padding row when the input row count is odd. Cosets pack through
// j = 2m + slope*i, so a cross-coset neighbor at offset (di, dj) of a B
// site lands at packed column m + (dj + 1 - slope*di)/2 in A, and the
// mirrored index for the update.
FanPair fan_split_cols(const MatD& x0, int slope) {
    int pr, pc2;
    split_dims_cols(x0.rows, x0.cols, pr, pc2);
    MatD x = pad_to(x0, pr, pc2 * 2);
    if (x.rows == 1) return line_split(x);

    modulate_rows(x);
    const int R = x.rows, c2 = pc2, C = pc2 * 2;
    MatD a(R, c2), b(R, c2);
    for (int i = 0; i < R; ++i) {
        for (int m = 0; m < c2; ++m) {
            a(i, m) = x(i, wrap(2 * m + slope * i, C));
            b(i, m) = x(i, wrap(2 * m + slope * i + 1, C));
        }
    }
    for (int i = 0; i < R; ++i) {
        for (int m = 0; m < c2; ++m) {
            double acc = 0.0;
            for (const LiftTap& t : kPredictTaps)
                acc += t.w * a(wrap(i + t.di, R), wrap(m + (t.dj + 1 - slope * t.di) / 2, c2));
            b(i, m) -= acc;
        }
    }
    for (int i = 0; i < R; ++i) {
        for (int m = 0; m < c2; ++m) {
            double acc = 0.0;
            for (const LiftTap& t : kPredictTaps)
                acc += 0.5 * t.w *
                       b(wrap(i + t.di, R), wrap(m + (t.dj - 1 - slope * t.di) / 2, c2));
            a(i, m) += acc;
        }
    }
    // Undo the modulation sign carried by each retained site, and halve the
    // detail branch so both channels carry unit passband gain.
    for (int i = 0; i < R; ++i) {
        double sgn = (i & 1) ? -1.0 : 1.0;
        for (int m = 0; m < c2; ++m) {
            a(i, m) *= sgn;
            b(i, m) *= detail_scale() * sgn;
        }
    }
    return {std::move(a), std::move(b)};
}

MatD fan_merge_cols(const FanPair& p, int orig_rows, int orig_cols, int slope) {
    int pr, pc2;
    split_dims_cols(orig_rows, orig_cols, pr, pc2);
    if (p.a.rows != pr || p.a.cols != pc2 || !p.a.same_dims(p.b))
        fail(ErrorCode::DimMismatch, "fan subband dims do not match the stated source size");
    if (pr == 1) return crop_to(line_merge(p), orig_rows, orig_cols);

    MatD a = p.a, b = p.b;
    const int R = pr, c2 = pc2, C = pc2 * 2;
    for (int i = 0; i < R; ++i) {
        double sgn = (i & 1) ? -1.0 : 1.0;
        for (int m = 0; m < c2; ++m) {
            a(i, m) *= sgn;
            b(i, m) *= sgn / detail_scale();
        }
    }
    for (int i = 0; i < R; ++i) {
        for (int m = 0; m < c2; ++m) {
            double acc = 0.0;
            for (const LiftTap& t : kPredictTaps)
                acc += 0.5 * t.w *
                       b(wrap(i + t.di, R), wrap(m + (t.dj - 1 - slope * t.di) / 2, c2));
            a(i, m) -= acc;
        }
    }
    for (int i = 0; i < R; ++i) {
        for (int m = 0; m < c2; ++m) {
            double acc = 0.0;
            for (const LiftTap& t : kPredictTaps)
                acc += t.w * a(wrap(i + t.di, R), wrap(m + (t.dj + 1 - slope * t.di) / 2, c2));
            b(i, m) += acc;
        }
    }
    MatD x(R, C);
    for (int i = 0; i < R; ++i) {
        for (int m = 0; m < c2; ++m) {
            x(i, wrap(2 * m + slope * i, C)) = a(i, m);
            x(i, wrap(2 * m + slope * i + 1, C)) = b(i, m);
        }
    }
    modulate_rows(x);
    return crop_to(x, orig_rows, orig_cols);
}

MatD transpose(const MatD& x) {
    MatD out(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) out(j, i) = x(i, j);
    return out;
}

FanPair fan_split_rows(const MatD& x, int slope) {
    FanPair p = fan_split_cols(transpose(x), slope);
    return {transpose(p.a), transpose(p.b)};
}

MatD fan_merge_rows(const FanPair& p, int orig_rows, int orig_cols, int slope) {
    FanPair t{transpose(p.a), transpose(p.b)};
    return transpose(fan_merge_cols(t, orig_cols, orig_rows, slope));
}

void split_dims_rows(int rows, int cols, int& out_rows, int& out_cols) {
    split_dims_cols(cols, rows, out_cols, out_rows);
}

MatD shear_rows(const MatD& x, int slope) {
    MatD out(x.rows, x.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int j = 0; j < x.cols; ++j) {
            int src = (j + slope * i) % x.cols;
            if (src < 0) src += x.cols;
            out(i, j) = x(i, src);
        }
    }
    return out;
}

MatD shear_cols(const MatD& x, int slope) {
    MatD out(x.rows, x.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int j = 0; j < x.cols; ++j) {
            int src = (i + slope * j) % x.rows;
            if (src < 0) src += x.rows;
            out(i, j) = x(src, j);
        }
    }
    return out;
}

// Slopes of the coset shears used by the first two tree levels. The column
// shear applied between them turns the composed sampling into twice a
// unimodular map, so the level-two boundary pulls back onto the coordinate
// axes and the quadrant wedges come out exact.
const int kSlopeL1 = 1;
const int kShearL2 = -1;
const int kSlopeL2 = 1;

// Third-level schedule: up to two lattice shears bring each quadrant's
// natural split boundary onto the standard slope-uniform wedge edges
// (tangents 0, +-1/2, +-2, infinity); a zero slope skips that shear.
struct L3Node {
    bool shear1_rows;
    int shear1_slope;
    bool shear2_rows;
    int shear2_slope;
    bool split_cols;
    int split_slope;
};
const std::array<L3Node, 4> kL3 = {{
    {true, 0, true, 0, true, 1},
    {true, -2, true, 0, true, 1},
    {false, -1, true, 0, false, 1},
    {true, -1, false, -1, true, 1},
}};

// Orientation order of the raw tree channels, fixed by the oriented-sinusoid
// probe so canonical direction d = tree channel kTreeOrder*[d]; canonical
// indices ascend with the wedge-center wavevector angle.
const std::array<int, 2> kTreeOrder2 = {1, 0};
const std::array<int, 4> kTreeOrder4 = {3, 1, 0, 2};
const std::array<int, 8> kTreeOrder8 = {7, 6, 3, 2, 0, 1, 4, 5};

MatD apply_shear(const MatD& x, bool along_rows, int slope) {
    if (slope == 0) return x;
    return along_rows ? shear_rows(x, slope) : shear_cols(x, slope);
}

std::vector<MatD> tree_decompose(const MatD& x, int n_dirs) {
    FanPair l1 = fan_split_cols(x, kSlopeL1);
    if (n_dirs == 2) return {std::move(l1.a), std::move(l1.b)};

    FanPair l2a = fan_split_rows(shear_cols(l1.a, kShearL2), kSlopeL2);
    FanPair l2b = fan_split_rows(shear_cols(l1.b, kShearL2), kSlopeL2);
    std::vector<MatD> quad;
    quad.push_back(std::move(l2a.a));
    quad.push_back(std::move(l2a.b));
    quad.push_back(std::move(l2b.a));
    quad.push_back(std::move(l2b.b));
    if (n_dirs == 4) return quad;

    std::vector<MatD> out;
    for (int k = 0; k < 4; ++k) {
        const L3Node& node = kL3[k];
        MatD y = apply_shear(apply_shear(quad[k], node.shear1_rows, node.shear1_slope),
                             node.shear2_rows, node.shear2_slope);
        if (y.rows == 1 && y.cols == 1) fail(ErrorCode::TooSmall, "cannot split a 1x1 band");
        bool split_cols = node.split_cols;
        if (!split_cols && y.rows == 1) split_cols = true;  // degenerate fallback
        if (split_cols && y.cols == 1) split_cols = false;
        FanPair p = split_cols ? fan_split_cols(y, node.split_slope)
                               : fan_split_rows(y, node.split_slope);
        out.push_back(std::move(p.a));
        out.push_back(std::move(p.b));
    }
    return out;
}

MatD tree_reconstruct(const std::vector<MatD>& ch, int n_dirs, int rows, int cols) {
    if (n_dirs == 2) return fan_merge_cols({ch[0], ch[1]}, rows, cols, kSlopeL1);

    int r1, c1;
    split_dims_cols(rows, cols, r1, c1);
    // Dimensions feeding level 2 are the level-1 outputs.
    if (n_dirs == 4) {
        MatD a = shear_cols(fan_merge_rows({ch[0], ch[1]}, r1, c1, kSlopeL2), -kShearL2);
        MatD b = shear_cols(fan_merge_rows({ch[2], ch[3]}, r1, c1, kSlopeL2), -kShearL2);
        return fan_merge_cols({std::move(a), std::move(b)}, rows, cols, kSlopeL1);
    }

    int r2, c2;
    split_dims_rows(r1, c1, r2, c2);
    std::vector<MatD> quad;
    for (int k = 0; k < 4; ++k) {
        const L3Node& node = kL3[k];
        bool split_cols = node.split_cols;
        if (!split_cols && r2 == 1) split_cols = true;
        if (split_cols && c2 == 1) split_cols = false;
        MatD y = split_cols
                     ? fan_merge_cols({ch[2 * k], ch[2 * k + 1]}, r2, c2, node.split_slope)
                     : fan_merge_rows({ch[2 * k], ch[2 * k + 1]}, r2, c2, node.split_slope);
        y = apply_shear(y, node.shear2_rows, -node.shear2_slope);
        quad.push_back(apply_shear(y, node.shear1_rows, -node.shear1_slope));
    }
    MatD a = shear_cols(fan_merge_rows({quad[0], quad[1]}, r1, c1, kSlopeL2), -kShearL2);
    MatD b = shear_cols(fan_merge_rows({quad[2], quad[3]}, r1, c1, kSlopeL2), -kShearL2);
    return fan_merge_cols({std::move(a), std::move(b)}, rows, cols, kSlopeL1);
}

const int* tree_order(int n_dirs) {
    switch (n_dirs) {
        case 2: return kTreeOrder2.data();
        case 4: return kTreeOrder4.data();
        case 8: return kTreeOrder8.data();
        default:
            fail(ErrorCode::UnsupportedDirectionCount,
                 "n_dirs must be 2, 4 or 8, got " + std::to_string(n_dirs));
    }
}

void check_band(const MatD& x) {
    if (x.empty()) fail(ErrorCode::TooSmall, "empty matrix");
}

} // namespace

std::pair<MatD, MatD> lp_decompose(const MatD& x, Boundary b) {
    if (x.rows < 2 || x.cols < 2)
        fail(ErrorCode::TooSmall, "pyramid level needs at least 2x2, got " +
                                      std::to_string(x.rows) + "x" + std::to_string(x.cols));
    MatD f = filter_horz(filter_vert(x, kAnalysisLow, b.rows_periodic, 1), kAnalysisLow,
                         b.cols_periodic, 1);
    MatD low((x.rows + 1) / 2, (x.cols + 1) / 2);
    for (int i = 0; i < low.rows; ++i)
        for (int j = 0; j < low.cols; ++j) low(i, j) = f(2 * i, 2 * j);
    MatD up = upsample_smooth(low, x.rows, x.cols, b);
    MatD band(x.rows, x.cols);
    for (size_t k = 0; k < band.v.size(); ++k) band.v[k] = x.v[k] - up.v[k];
    return {std::move(low), std::move(band)};
}

MatD lp_reconstruct(const MatD& lowpass, const MatD& bandpass, Boundary b) {
    if (lowpass.rows != (bandpass.rows + 1) / 2 || lowpass.cols != (bandpass.cols + 1) / 2)
        fail(ErrorCode::DimMismatch, "lowpass dims are not the half-size of the bandpass");
    MatD up = upsample_smooth(lowpass, bandpass.rows, bandpass.cols, b);
    MatD x(bandpass.rows, bandpass.cols);
    for (size_t k = 0; k < x.v.size(); ++k) x.v[k] = bandpass.v[k] + up.v[k];
    return x;
}

std::vector<MatD> dfb_decompose(const MatD& x, int n_dirs) {
    check_band(x);
    const int* order = tree_order(n_dirs);
    std::vector<MatD> tree = tree_decompose(x, n_dirs);
    std::vector<MatD> out(tree.size());
    for (int d = 0; d < n_dirs; ++d) out[d] = std::move(tree[order[d]]);
    return out;
}

MatD dfb_reconstruct(const std::vector<MatD>& subbands, int rows, int cols) {
    int n_dirs = static_cast<int>(subbands.size());
    const int* order = tree_order(n_dirs);
    std::vector<MatD> tree(subbands.size());
    for (int d = 0; d < n_dirs; ++d) tree[order[d]] = subbands[d];
    return tree_reconstruct(tree, n_dirs, rows, cols);
}

MatD dfb_reconstruct(const std::vector<MatD>& subbands) {
    int n_dirs = static_cast<int>(subbands.size());
    const int* order = tree_order(n_dirs);
    // Channel at tree position 0 went through column halvings only at
    // levels 1 and 3 plus one row halving at level 2.
    int pos0 = 0;
    for (int d = 0; d < n_dirs; ++d)
        if (order[d] == 0) pos0 = d;
    const MatD& c0 = subbands[pos0];
    int rows = c0.rows, cols = c0.cols;
    if (n_dirs == 2) {
        cols *= 2;
    } else if (n_dirs == 4) {
        rows *= 2;
        cols *= 2;
    } else {
        rows *= 2;
        cols *= 4;
    }
    return dfb_reconstruct(subbands, rows, cols);
}

ContourletPyramid ct_decompose(const MatD& x, const PyramidConfig& cfg) {
    check_band(x);
    if (cfg.levels != static_cast<int>(cfg.dirs_per_level.size()) || cfg.levels < 1)
        fail(ErrorCode::BadConfig, "levels must equal the direction-count list length");
    int min_dim = 1 << cfg.levels;
    if (x.rows < min_dim || x.cols < min_dim)
        fail(ErrorCode::TooSmall, "input dims must be at least 2^levels in each axis");

    ContourletPyramid p;
    p.config = cfg;
    p.source_rows = x.rows;
    p.source_cols = x.cols;
    MatD cur = x;
    for (int level = 0; level < cfg.levels; ++level) {
        auto [low, band] = lp_decompose(cur, cfg.boundary);
        p.bands.push_back(dfb_decompose(band, cfg.dirs_per_level[level]));
        cur = std::move(low);
    }
    p.lowpass = std::move(cur);
    return p;
}

MatD ct_reconstruct(const ContourletPyramid& p) {
    int levels = p.config.levels;
    if (levels != static_cast<int>(p.bands.size()))
        fail(ErrorCode::MalformedPyramid, "band list length does not match config");
    std::vector<std::pair<int, int>> dims(levels + 1);
    dims[0] = {p.source_rows, p.source_cols};
    for (int l = 1; l <= levels; ++l)
        dims[l] = {(dims[l - 1].first + 1) / 2, (dims[l - 1].second + 1) / 2};
    if (p.lowpass.rows != dims[levels].first || p.lowpass.cols != dims[levels].second)
        fail(ErrorCode::MalformedPyramid, "lowpass dims inconsistent with source dims");

    MatD cur = p.lowpass;
    for (int level = levels - 1; level >= 0; --level) {
        if (static_cast<int>(p.bands[level].size()) != p.config.dirs_per_level[level])
            fail(ErrorCode::MalformedPyramid, "direction count mismatch at level " +
                                                  std::to_string(level + 1));
        MatD band = dfb_reconstruct(p.bands[level], dims[level].first, dims[level].second);
        cur = lp_reconstruct(cur, band, p.config.boundary);
    }
    return cur;
}

size_t coefficient_count(const ContourletPyramid& p) {
    size_t n = p.lowpass.size();
    for (const auto& level : p.bands)
        for (const auto& sub : level) n += sub.size();
    return n;
}

std::vector<double> flatten(const ContourletPyramid& p) {
    std::vector<double> out;
    out.reserve(coefficient_count(p));
    out.insert(out.end(), p.lowpass.v.begin(), p.lowpass.v.end());
    for (int level = static_cast<int>(p.bands.size()) - 1; level >= 0; --level)
        for (const MatD& sub : p.bands[level])
            out.insert(out.end(), sub.v.begin(), sub.v.end());
    return out;
}

MatU8 block_and_mask(const MatU8& mask, int sub_rows, int sub_cols) {
    if (sub_rows < 1 || sub_cols < 1 || sub_rows > mask.rows || sub_cols > mask.cols)
        fail(ErrorCode::DimMismatch, "mask target dims invalid");
    MatU8 out(sub_rows, sub_cols, 1);
    for (int a = 0; a < sub_rows; ++a) {
        int r0 = a * mask.rows / sub_rows;
        int r1 = std::max(r0 + 1, (a + 1) * mask.rows / sub_rows);
        for (int b = 0; b < sub_cols; ++b) {
            int c0 = b * mask.cols / sub_cols;
            int c1 = std::max(c0 + 1, (b + 1) * mask.cols / sub_cols);
            uint8_t all = 1;
            for (int i = r0; i < r1 && all; ++i)
                for (int j = c0; j < c1; ++j)
                    if (!mask(i, j)) {
                        all = 0;
                        break;
                    }
            out(a, b) = all;
        }
    }
    return out;
}

AtrousPyramid atrous_decompose(const MatD& x, int levels, Boundary b) {
    check_band(x);
    if (levels < 1) fail(ErrorCode::BadConfig, "levels must be positive");
    AtrousPyramid p;
    MatD cur = x;
    int spacing = 1;
    for (int l = 0; l < levels; ++l) {
        MatD low = filter_horz(filter_vert(cur, kAnalysisLow, b.rows_periodic, 1, spacing),
                               kAnalysisLow, b.cols_periodic, 1, spacing);
        MatD band(cur.rows, cur.cols);
        for (size_t k = 0; k < band.v.size(); ++k) band.v[k] = cur.v[k] - low.v[k];
        p.bands.push_back(std::move(band));
        cur = std::move(low);
        spacing *= 2;
    }
    p.lowpass = std::move(cur);
    return p;
}

namespace {

struct Tap2D {
    int di;
    int dj;
    double w;
};

struct Kernel2D {
    std::vector<Tap2D> taps;
};

// Integer lattice map acting on tap offsets: (di, dj) -> (a*di + b*dj, c*di + d*dj).
struct LatMap {
    int a, b, c, d;
};

LatMap compose(const LatMap& p, const LatMap& q) {
    return {p.a * q.a + p.b * q.c, p.a * q.b + p.b * q.d, p.c * q.a + p.d * q.c,
            p.c * q.b + p.d * q.d};
}

Kernel2D map_kernel(const Kernel2D& k, const LatMap& m) {
    Kernel2D out = k;
    for (Tap2D& t : out.taps) {
        int di = m.a * t.di + m.b * t.dj;
        int dj = m.c * t.di + m.d * t.dj;
        t.di = di;
        t.dj = dj;
    }
    return out;
}

void add_tap(std::map<std::pair<int, int>, double>& acc, int di, int dj, double w) {
    acc[{di, dj}] += w;
}

// Diamond pair the lifting steps realize, flattened to full-rate filters
// (analysis high = 1 - predict, analysis low = 1 + update - update*predict)
// and modulated by (-1)^row into the fan pair.
Kernel2D fan_kernel(bool high) {
    std::map<std::pair<int, int>, double> acc;
    if (high) {
        add_tap(acc, 0, 0, 1.0);
        for (const LiftTap& t : kPredictTaps) add_tap(acc, t.di, t.dj, -t.w);
    } else {
        add_tap(acc, 0, 0, 1.0);
        for (const LiftTap& u : kPredictTaps) {
            add_tap(acc, u.di, u.dj, 0.5 * u.w);
            for (const LiftTap& p : kPredictTaps)
                add_tap(acc, u.di + p.di, u.dj + p.dj, -0.5 * u.w * p.w);
        }
    }
    Kernel2D k;
    double gain = high ? detail_scale() : 1.0;  // match the decimated bank's branch scaling
    for (const auto& [off, w] : acc) {
        if (w == 0.0) continue;
        double sgn = (off.first & 1) ? -1.0 : 1.0;  // (-1)^row modulation
        k.taps.push_back({off.first, off.second, sgn * w * gain});
    }
    return k;
}

Kernel2D transpose_kernel(const Kernel2D& k) {
    Kernel2D out = k;
    for (Tap2D& t : out.taps) std::swap(t.di, t.dj);
    return out;
}

MatD conv2(const MatD& x, const Kernel2D& k, Boundary b) {
    MatD out(x.rows, x.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int j = 0; j < x.cols; ++j) {
            double acc = 0.0;
            for (const Tap2D& t : k.taps) {
                int si = fold_index(i + t.di, x.rows, b.rows_periodic);
                int sj = fold_index(j + t.dj, x.cols, b.cols_periodic);
                acc += t.w * x(si, sj);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

// Sampling geometry of the decimated tree, used to place the full-rate
// kernels of deeper levels on the equivalent resampled lattice.
LatMap pack_cols_map(int slope) { return {1, 0, slope, 2}; }
LatMap pack_rows_map(int slope) { return {2, slope, 0, 1}; }
LatMap shear_map(bool along_rows, int slope) {
    return along_rows ? LatMap{1, 0, slope, 1} : LatMap{1, slope, 0, 1};
}

} // namespace

std::vector<MatD> nsdfb_decompose(const MatD& x, int n_dirs) {
    check_band(x);
    const int* order = tree_order(n_dirs);
    Boundary b;

    Kernel2D f0 = fan_kernel(false), f1 = fan_kernel(true);
    Kernel2D g0 = transpose_kernel(f0), g1 = transpose_kernel(f1);

    std::vector<MatD> level1 = {conv2(x, f0, b), conv2(x, f1, b)};
    std::vector<MatD> tree;
    if (n_dirs == 2) {
        tree = std::move(level1);
    } else {
        LatMap m1 = compose(pack_cols_map(kSlopeL1), shear_map(false, kShearL2));
        Kernel2D u0 = map_kernel(g0, m1), u1 = map_kernel(g1, m1);
        std::vector<MatD> level2;
        for (const MatD& c : level1) {
            level2.push_back(conv2(c, u0, b));
            level2.push_back(conv2(c, u1, b));
        }
        if (n_dirs == 4) {
            tree = std::move(level2);
        } else {
            LatMap m12 = compose(m1, pack_rows_map(kSlopeL2));
            for (int k = 0; k < 4; ++k) {
                const L3Node& node = kL3[k];
                LatMap m = compose(compose(m12, shear_map(node.shear1_rows, node.shear1_slope)),
                                   shear_map(node.shear2_rows, node.shear2_slope));
                const Kernel2D& base0 = node.split_cols ? f0 : g0;
                const Kernel2D& base1 = node.split_cols ? f1 : g1;
                tree.push_back(conv2(level2[k], map_kernel(base0, m), b));
                tree.push_back(conv2(level2[k], map_kernel(base1, m), b));
            }
        }
    }
    std::vector<MatD> out(tree.size());
    for (int d = 0; d < n_dirs; ++d) out[d] = std::move(tree[order[d]]);
    return out;
}

} // namespace irisct::ct

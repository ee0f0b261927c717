#include "irisct/segment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace irisct {
namespace {

constexpr int kAngularSamples = 64;
constexpr double kPupilInteriorCeiling = 90.0;  // mean shade gate for pupil candidates
constexpr double kEyelidGradientFloor = 25.0;   // vertical gradient for Hough voting
constexpr int kDogRadius = 4;
constexpr double kCenterSearchBox = 15.0;  // iris center offset bound from the pupil

struct DirTable {
    std::array<double, kAngularSamples> cx;
    std::array<double, kAngularSamples> cy;
    std::array<bool, kAngularSamples> lateral;
};

const DirTable& directions() {
    static const DirTable t = [] {
        DirTable d;
        for (int k = 0; k < kAngularSamples; ++k) {
            double th = 2.0 * M_PI * k / kAngularSamples;
            d.cx[k] = std::cos(th);
            d.cy[k] = std::sin(th);
            // Left and right quarter arcs, used for the iris boundary where
            // the top and bottom may sit under an eyelid.
            d.lateral[k] = std::abs(d.cx[k]) >= std::cos(M_PI / 4) - 1e-12;
        }
        return d;
    }();
    return t;
}

bool sampleable(const GrayImage& img, double x, double y) {
    return x >= 0.0 && y >= 0.0 && x <= img.width - 1.0 && y <= img.height - 1.0;
}

// Mean intensity along the circle, bilinear samples at 64 angles. Returns
// nothing when too few samples land inside the image.
std::optional<double> contour_mean(const GrayImage& img, double cx, double cy, double r,
                                   bool lateral_only) {
    const DirTable& d = directions();
    double sum = 0.0;
    int n = 0, wanted = 0;
    for (int k = 0; k < kAngularSamples; ++k) {
        if (lateral_only && !d.lateral[k]) continue;
        ++wanted;
        double x = cx + r * d.cx[k];
        double y = cy + r * d.cy[k];
        if (!sampleable(img, x, y)) continue;
        sum += img.sample(x, y);
        ++n;
    }
    if (n * 4 < wanted * 3) return std::nullopt;
    return sum / n;
}

// Derivative-of-Gaussian taps normalized so a unit intensity step across
// the contour scores 1, which makes the response floor an edge-contrast
// floor in intensity units.
std::vector<double> dog_kernel(double sigma) {
    std::vector<double> k(2 * kDogRadius + 1);
    double pos = 0.0;
    for (int t = -kDogRadius; t <= kDogRadius; ++t) {
        k[t + kDogRadius] = t * std::exp(-0.5 * t * t / (sigma * sigma));
        if (t > 0) pos += k[t + kDogRadius];
    }
    for (double& v : k) v /= pos;
    return k;
}

struct Candidate {
    double cx = 0, cy = 0, r = 0;
    double score = -std::numeric_limits<double>::infinity();
};

bool contains_circle(double cx, double cy, double r, const Circle& inner) {
    return std::hypot(cx - inner.cx, cy - inner.cy) + inner.r < r - 1;
}

// Coarse scan: centers on a step-2 grid in a box, radii step 2, scored by
// the absolute first difference of the contour mean. When contain is given,
// only circles strictly enclosing it compete.
Candidate coarse_scan(const GrayImage& img, double cx0, double cy0, double box, double r_lo,
                      double r_hi, bool lateral_only, bool dark_interior,
                      const Circle* contain = nullptr) {
    Candidate best;
    for (double cy = cy0 - box; cy <= cy0 + box + 1e-9; cy += 2) {
        for (double cx = cx0 - box; cx <= cx0 + box + 1e-9; cx += 2) {
            std::optional<double> prev;
            double prev_r = 0;
            for (double r = r_lo; r <= r_hi + 1e-9; r += 2) {
                std::optional<double> m = contour_mean(img, cx, cy, r, lateral_only);
                if (!m) break;
                if (prev) {
                    double score = std::abs(*m - *prev);
                    double r_mid = 0.5 * (prev_r + r);
                    if (score > best.score &&
                        (!contain || contains_circle(cx, cy, r_mid, *contain))) {
                        bool ok = true;
                        if (dark_interior) {
                            // Ring just inside the candidate edge: dark for a
                            // pupil boundary, iris-bright for a limbus one.
                            std::optional<double> inner =
                                contour_mean(img, cx, cy, std::max(1.0, r_mid - 4), false);
                            ok = inner && *inner <= kPupilInteriorCeiling;
                        }
                        if (ok) best = {cx, cy, r_mid, score};
                    }
                }
                prev = m;
                prev_r = r;
            }
        }
    }
    return best;
}

// Fine scan around a coarse hit: unit-step centers and radii, response is
// the smoothed radial derivative of the contour mean. Profile samples in
// the kernel pad that fall off the image or under r=2 are filled with the
// nearest valid value so no artificial edge appears at the range ends.
Candidate fine_scan(const GrayImage& img, const Candidate& seed, double box_cx, double box_cy,
                    double box, double r_lo, double r_hi, double sigma, bool lateral_only,
                    const Circle* contain = nullptr) {
    std::vector<double> dog = dog_kernel(sigma);
    Candidate best;
    double lo = std::max(r_lo, seed.r - 6);
    double hi = std::min(r_hi, seed.r + 6);
    if (lo > hi) return best;
    int n_core = static_cast<int>(hi - lo) + 1;
    int n_prof = n_core + 2 * kDogRadius;
    std::vector<double> prof(n_prof);
    std::vector<bool> have(n_prof);
    for (double cy = seed.cy - 3; cy <= seed.cy + 3 + 1e-9; cy += 1) {
        if (std::abs(cy - box_cy) > box) continue;
        for (double cx = seed.cx - 3; cx <= seed.cx + 3 + 1e-9; cx += 1) {
            if (std::abs(cx - box_cx) > box) continue;
            bool ok = true;
            for (int i = 0; i < n_prof; ++i) {
                double r = lo - kDogRadius + i;
                std::optional<double> m =
                    r >= 2 ? contour_mean(img, cx, cy, r, lateral_only) : std::nullopt;
                have[i] = m.has_value();
                prof[i] = m.value_or(0.0);
                bool in_core = i >= kDogRadius && i < kDogRadius + n_core;
                if (in_core && !have[i]) ok = false;
            }
            if (!ok) continue;
            for (int i = kDogRadius - 1; i >= 0; --i)
                if (!have[i]) prof[i] = prof[i + 1];
            for (int i = kDogRadius + n_core; i < n_prof; ++i)
                if (!have[i]) prof[i] = prof[i - 1];
            for (int ri = 0; ri < n_core; ++ri) {
                if (contain && !contains_circle(cx, cy, lo + ri, *contain)) continue;
                double resp = 0.0;
                for (int t = -kDogRadius; t <= kDogRadius; ++t)
                    resp += dog[t + kDogRadius] * prof[ri + kDogRadius + t];
                resp = std::abs(resp);
                if (resp > best.score) best = {cx, cy, lo + ri, resp};
            }
        }
    }
    return best;
}

double dist(double ax, double ay, double bx, double by) { return std::hypot(ax - bx, ay - by); }

// Centroid of the darkest pixels, a cheap pupil seed: the pupil is the
// darkest extended region and its centroid is near its center for any size.
void dark_centroid(const GrayImage& img, double& cx, double& cy) {
    uint8_t lo = 255;
    for (uint8_t p : img.pixels) lo = std::min(lo, p);
    double sx = 0, sy = 0;
    int64_t n = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y) <= lo + 15) {
                sx += x;
                sy += y;
                ++n;
            }
    cx = sx / n;
    cy = sy / n;
}

double line_y_at(const EyelidLine& l, double x) { return (l.c - l.a * x) / l.b; }

// Intersections of a line with a circle; empty when they miss.
std::vector<std::pair<double, double>> line_circle(const EyelidLine& l, const Circle& c) {
    // Point on line closest to the circle center.
    double d = l.a * c.cx + l.b * c.cy - l.c;
    double px = c.cx - l.a * d;
    double py = c.cy - l.b * d;
    double h2 = c.r * c.r - d * d;
    if (h2 < 0) return {};
    double h = std::sqrt(h2);
    // Direction along the line.
    double tx = -l.b, ty = l.a;
    return {{px + h * tx, py + h * ty}, {px - h * tx, py - h * ty}};
}

} // namespace

std::pair<Circle, Circle> locate_pupil_iris(const GrayImage& img, double r_min, double r_max,
                                            double id_sigma, double id_floor) {
    if (!(r_min < r_max) || r_min <= 2)
        fail(ErrorCode::SpecOutOfBounds, "invalid radius search range");
    if (img.width < 3 || img.height < 3) fail(ErrorCode::SpecOutOfBounds, "image too small");

    double seed_x, seed_y;
    dark_centroid(img, seed_x, seed_y);

    Candidate pc = coarse_scan(img, seed_x, seed_y, 12, r_min, r_max, false, true);
    if (!std::isfinite(pc.score)) fail(ErrorCode::NoBoundaryFound, "no dark-interior circle");
    Candidate pf = fine_scan(img, pc, pc.cx, pc.cy, 1e9, r_min, r_max, id_sigma, false);
    if (pf.score < id_floor) fail(ErrorCode::NoBoundaryFound, "pupil response under floor");
    Circle pupil{pf.cx, pf.cy, pf.r};

    double ir_lo = std::max(r_min, pupil.r + 10);
    Candidate ic = coarse_scan(img, pupil.cx, pupil.cy, 14, ir_lo, r_max, true, false, &pupil);
    if (!std::isfinite(ic.score)) fail(ErrorCode::NoBoundaryFound, "no iris candidate");
    Candidate iff = fine_scan(img, ic, pupil.cx, pupil.cy, kCenterSearchBox, ir_lo, r_max,
                              id_sigma, true, &pupil);
    if (iff.score < id_floor) fail(ErrorCode::NoBoundaryFound, "iris response under floor");
    return {pupil, Circle{iff.cx, iff.cy, iff.r}};
}

std::vector<EyelidLine> detect_eyelids(const GrayImage& img, const Circle& pupil,
                                       const Circle& iris, double vote_floor) {
    // Accumulator over (tilt, offset): x sin(alpha) + y cos(alpha) = rho,
    // tilt within 30 degrees of horizontal.
    constexpr int kTiltSteps = 21;
    constexpr double kTiltMax = 30.0 * M_PI / 180.0;
    int rho_pad = static_cast<int>(img.width * std::sin(kTiltMax)) + 2;
    int rho_bins = img.height + 2 * rho_pad;
    MatI acc(kTiltSteps, rho_bins);

    std::vector<double> sin_a(kTiltSteps), cos_a(kTiltSteps);
    for (int t = 0; t < kTiltSteps; ++t) {
        double alpha = -kTiltMax + 2 * kTiltMax * t / (kTiltSteps - 1);
        sin_a[t] = std::sin(alpha);
        cos_a[t] = std::cos(alpha);
    }

    for (int y = 1; y < img.height - 1; ++y) {
        for (int x = 1; x < img.width - 1; ++x) {
            if (dist(x, y, iris.cx, iris.cy) >= iris.r - 2) continue;
            if (dist(x, y, pupil.cx, pupil.cy) <= pupil.r + 3) continue;
            double gy = 0.5 * (img.at(x, y + 1) - img.at(x, y - 1));
            if (std::abs(gy) < kEyelidGradientFloor) continue;
            for (int t = 0; t < kTiltSteps; ++t) {
                int rho = static_cast<int>(std::lround(x * sin_a[t] + y * cos_a[t]));
                int bin = rho + rho_pad;
                if (bin >= 0 && bin < rho_bins) ++acc(t, bin);
            }
        }
    }

    int best_upper = 0, best_lower = 0;
    EyelidLine upper, lower;
    for (int t = 0; t < kTiltSteps; ++t) {
        for (int b = 0; b < rho_bins; ++b) {
            int v = acc(t, b);
            if (v == 0) continue;
            EyelidLine l{sin_a[t], cos_a[t], static_cast<double>(b - rho_pad)};
            bool is_upper = line_y_at(l, pupil.cx) < pupil.cy;
            if (is_upper && v > best_upper) {
                best_upper = v;
                upper = l;
            } else if (!is_upper && v > best_lower) {
                best_lower = v;
                lower = l;
            }
        }
    }

    std::vector<EyelidLine> out;
    if (best_upper >= vote_floor) out.push_back(upper);
    if (best_lower >= vote_floor) out.push_back(lower);
    return out;
}

MatU8 detect_eyelashes(const GrayImage& img, double gabor_threshold, double variance_threshold,
                       int window) {
    if (gabor_threshold <= 0 || variance_threshold <= 0)
        fail(ErrorCode::SpecOutOfBounds, "thresholds must be positive");
    if (window < 1 || window % 2 == 0)
        fail(ErrorCode::SpecOutOfBounds, "window must be odd and positive");
    const int W = img.width, H = img.height;
    MatU8 mask(H, W);

    // Horizontal Gabor, cosine phase: responds with the local brightness for
    // smooth areas and dips on thin dark vertical structure.
    constexpr int kGr = 4;
    constexpr double kGaborSigma = 1.5;
    constexpr double kGaborWavelength = 6.0;
    std::array<double, 2 * kGr + 1> gk;
    for (int t = -kGr; t <= kGr; ++t)
        gk[t + kGr] = std::exp(-0.5 * t * t / (kGaborSigma * kGaborSigma)) *
                      std::cos(2.0 * M_PI * t / kGaborWavelength);

    // Median via histogram, for the dark-mean guard.
    std::array<int64_t, 256> hist{};
    for (uint8_t p : img.pixels) ++hist[p];
    int64_t half = static_cast<int64_t>(img.pixels.size() + 1) / 2, run = 0;
    int median = 0;
    for (int v = 0; v < 256; ++v) {
        run += hist[v];
        if (run >= half) {
            median = v;
            break;
        }
    }

    // Summed-area tables for windowed mean and variance.
    std::vector<double> sat(static_cast<size_t>(H + 1) * (W + 1), 0.0);
    std::vector<double> sat2(static_cast<size_t>(H + 1) * (W + 1), 0.0);
    auto S = [&](std::vector<double>& s, int y, int x) -> double& {
        return s[static_cast<size_t>(y) * (W + 1) + x];
    };
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double p = img.at(x, y);
            S(sat, y + 1, x + 1) = p + S(sat, y, x + 1) + S(sat, y + 1, x) - S(sat, y, x);
            S(sat2, y + 1, x + 1) =
                p * p + S(sat2, y, x + 1) + S(sat2, y + 1, x) - S(sat2, y, x);
        }
    auto box = [&](std::vector<double>& s, int y0, int x0, int y1, int x1) {
        return S(s, y1 + 1, x1 + 1) - S(s, y0, x1 + 1) - S(s, y1 + 1, x0) + S(s, y0, x0);
    };

    int hw = window / 2;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            double resp = 0.0;
            for (int t = -kGr; t <= kGr; ++t)
                resp += gk[t + kGr] * img.at(std::clamp(x + t, 0, W - 1), y);
            bool lash = std::abs(resp) < gabor_threshold;
            if (!lash) {
                int y0 = std::max(0, y - hw), y1 = std::min(H - 1, y + hw);
                int x0 = std::max(0, x - hw), x1 = std::min(W - 1, x + hw);
                double n = static_cast<double>(y1 - y0 + 1) * (x1 - x0 + 1);
                double mu = box(sat, y0, x0, y1, x1) / n;
                double var = box(sat2, y0, x0, y1, x1) / n - mu * mu;
                lash = var < variance_threshold && mu < median;
            }
            mask(y, x) = lash ? 1 : 0;
        }
    }
    return mask;
}

Circle isolate_collarette(const Circle& pupil, const Circle& iris, double fraction) {
    return {pupil.cx, pupil.cy, pupil.r + fraction * (iris.r - pupil.r)};
}

Segmentation segment_eye(const GrayImage& img, const SegmentParams& params) {
    Segmentation seg;
    std::tie(seg.pupil, seg.iris) =
        locate_pupil_iris(img, params.r_min, params.r_max, params.id_sigma, params.id_floor);
    seg.collarette = isolate_collarette(seg.pupil, seg.iris, params.collarette_fraction);
    seg.eyelid_lines = detect_eyelids(img, seg.pupil, seg.iris, params.hough_vote_floor);
    MatU8 lashes = detect_eyelashes(img, params.gabor_threshold, params.variance_threshold,
                                    params.eyelash_window);

    // Per-line clip: drop the far side of the pupil, then also everything
    // past the horizontal through the line's iris intersection nearest the
    // pupil, which closes the sliver a tilted lid leaves near the limbus.
    struct Clip {
        EyelidLine line;
        double side;  // sign of the pupil-center halfplane
        bool horiz_above;
        double horiz_y;
    };
    std::vector<Clip> clips;
    for (const EyelidLine& l : seg.eyelid_lines) {
        Clip c;
        c.line = l;
        c.side = l.a * seg.pupil.cx + l.b * seg.pupil.cy - l.c;
        bool is_upper = line_y_at(l, seg.pupil.cx) < seg.pupil.cy;
        c.horiz_above = is_upper;
        c.horiz_y = is_upper ? -1e18 : 1e18;
        auto pts = line_circle(l, seg.iris);
        if (!pts.empty()) {
            auto d0 = dist(pts[0].first, pts[0].second, seg.pupil.cx, seg.pupil.cy);
            auto d1 = dist(pts[1].first, pts[1].second, seg.pupil.cx, seg.pupil.cy);
            c.horiz_y = d0 <= d1 ? pts[0].second : pts[1].second;
        }
        clips.push_back(c);
    }

    seg.noise_mask = MatU8(img.height, img.width);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double dp = dist(x, y, seg.pupil.cx, seg.pupil.cy);
            if (dp <= seg.pupil.r || dp > seg.collarette.r) continue;
            if (dist(x, y, seg.iris.cx, seg.iris.cy) >= seg.iris.r) continue;
            if (lashes(y, x)) continue;
            bool clipped = false;
            for (const Clip& c : clips) {
                double s = c.line.a * x + c.line.b * y - c.line.c;
                if (s * c.side < 0) {
                    clipped = true;
                    break;
                }
                if (c.horiz_above ? y < c.horiz_y : y > c.horiz_y) {
                    clipped = true;
                    break;
                }
            }
            if (!clipped) seg.noise_mask(y, x) = 1;
        }
    }
    return seg;
}

} // namespace irisct

#include "irisct/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "irisct/error.hpp"

namespace irisct {

namespace {

void check_same_length(size_t a, size_t b) {
    if (a != b) fail(ErrorCode::DimMismatch, "vector lengths differ");
}

double kernel_eval(const SvmParams& p, std::span<const double> a, std::span<const double> b) {
    if (p.kernel == SvmParams::Kernel::Linear) {
        double s = 0;
        for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
        return s;
    }
    double d2 = 0;
    for (size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        d2 += d * d;
    }
    return std::exp(-p.gamma * d2);
}

std::span<const double> row(const MatD& m, int r) {
    return {m.v.data() + static_cast<size_t>(r) * m.cols, static_cast<size_t>(m.cols)};
}

/// Solves one binary soft-margin dual: max sum(alpha) - 1/2 a'Qa subject to
/// 0 <= alpha <= C and y'alpha = 0, by repeatedly updating the
/// most-violating pair. Returns alpha and the offset.
std::pair<std::vector<double>, double> smo_solve(const MatD& gram,
                                                 const std::vector<int>& y,
                                                 const SvmParams& p) {
    const int n = gram.rows;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // d/dalpha of the minimized dual at 0

    int iter = 0;
    double m_up = 0, m_low = 0;
    for (; iter < p.max_iter; ++iter) {
        int i = -1, j = -1;
        m_up = -std::numeric_limits<double>::infinity();
        m_low = std::numeric_limits<double>::infinity();
        for (int t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            const bool up = (y[t] > 0 && alpha[t] < p.c) || (y[t] < 0 && alpha[t] > 0);
            const bool low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < p.c);
            if (up && v > m_up) {
                m_up = v;
                i = t;
            }
            if (low && v < m_low) {
                m_low = v;
                j = t;
            }
        }
        if (i < 0 || j < 0 || m_up - m_low <= p.tol) break;

        const double curvature = std::max(gram(i, i) + gram(j, j) - 2.0 * gram(i, j), 1e-12);
        double delta = (m_up - m_low) / curvature;

        // alpha_i moves by +y_i*delta and alpha_j by -y_j*delta; clip delta
        // so both stay inside [0, C]. The working-set choice guarantees
        // both caps are strictly positive.
        const double cap_i = y[i] > 0 ? p.c - alpha[i] : alpha[i];
        const double cap_j = y[j] > 0 ? alpha[j] : p.c - alpha[j];
        delta = std::min({delta, cap_i, cap_j});

        alpha[i] += y[i] * delta;
        alpha[j] -= y[j] * delta;
        for (int t = 0; t < n; ++t)
            grad[t] += y[t] * delta * (gram(t, i) - gram(t, j));
    }

    // Offset from the violation bracket at the stopping point.
    double bias = 0;
    if (std::isfinite(m_up) && std::isfinite(m_low))
        bias = (m_up + m_low) / 2.0;
    return {std::move(alpha), bias};
}

} // namespace

double hamming(std::span<const int8_t> a, std::span<const int8_t> b,
               std::span<const uint8_t> mask_a, std::span<const uint8_t> mask_b) {
    check_same_length(a.size(), b.size());
    if (!mask_a.empty()) check_same_length(a.size(), mask_a.size());
    if (!mask_b.empty()) check_same_length(b.size(), mask_b.size());
    long valid = 0, differ = 0;
    for (size_t k = 0; k < a.size(); ++k) {
        if (!mask_a.empty() && !mask_a[k]) continue;
        if (!mask_b.empty() && !mask_b[k]) continue;
        ++valid;
        differ += a[k] != b[k];
    }
    if (valid == 0) fail(ErrorCode::EmptyMask, "no jointly valid positions");
    return double(differ) / double(valid);
}

double trit_distance(std::span<const int8_t> a, std::span<const int8_t> b) {
    check_same_length(a.size(), b.size());
    if (a.empty()) return 0.0;
    long differ = 0;
    for (size_t k = 0; k < a.size(); ++k) differ += a[k] != b[k];
    return double(differ) / double(a.size());
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    check_same_length(a.size(), b.size());
    double s = 0;
    for (size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

MatchResult cascade_match(const FeatureVector& probe, const FeatureVector& gallery,
                          double t_local_lo, double t_local_hi, double t_global) {
    if (probe.method != FeatureMethod::Combined || gallery.method != FeatureMethod::Combined)
        fail(ErrorCode::DimMismatch, "cascade matching needs combined templates");
    const double d_local = trit_distance(probe.codes, gallery.codes);
    MatchResult r;
    r.distance = d_local;
    r.threshold = t_local_lo;
    if (d_local <= t_local_lo) {
        r.accept = true;
        return r;
    }
    if (d_local >= t_local_hi) {
        r.accept = false;
        return r;
    }
    const double d_global = euclidean(probe.reals, gallery.reals);
    r.distance = d_global;
    r.threshold = t_global;
    r.accept = d_global <= t_global;
    return r;
}

double nlac_distance(const FeatureVector& gallery, std::span<const int8_t> probe_sign_code) {
    if (gallery.method != FeatureMethod::Nlac)
        fail(ErrorCode::DimMismatch, "sparse matching needs a significant-coefficient template");
    if (gallery.indices.empty()) fail(ErrorCode::EmptyMask, "template has no positions");
    long differ = 0;
    for (size_t k = 0; k < gallery.indices.size(); ++k) {
        const int32_t idx = gallery.indices[k];
        if (idx < 0 || size_t(idx) >= probe_sign_code.size())
            fail(ErrorCode::DimMismatch, "template position outside the probe code");
        differ += probe_sign_code[idx] != gallery.codes[k];
    }
    return double(differ) / double(gallery.indices.size());
}

CentroidModel centroid_train(const MatD& x, std::span<const int> labels) {
    if (labels.size() != size_t(x.rows))
        fail(ErrorCode::DimMismatch, "one label per row required");
    std::map<int, std::pair<std::vector<double>, int>> sums;
    for (int r = 0; r < x.rows; ++r) {
        auto& [sum, count] = sums[labels[r]];
        sum.resize(x.cols, 0.0);
        for (int c = 0; c < x.cols; ++c) sum[c] += x(r, c);
        ++count;
    }
    if (sums.size() < 2) fail(ErrorCode::DegenerateLabels, "need at least two classes");
    CentroidModel m;
    m.centers = MatD(int(sums.size()), x.cols);
    int r = 0;
    for (const auto& [cls, acc] : sums) {
        m.classes.push_back(cls);
        for (int c = 0; c < x.cols; ++c) m.centers(r, c) = acc.first[c] / acc.second;
        ++r;
    }
    return m;
}

int centroid_predict(const CentroidModel& model, std::span<const double> x) {
    if (x.size() != size_t(model.centers.cols))
        fail(ErrorCode::DimMismatch, "probe dimension differs from training");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t r = 0; r < model.classes.size(); ++r) {
        const double d = euclidean(x, row(model.centers, int(r)));
        if (d < best_d) {
            best_d = d;
            best = int(r);
        }
    }
    return model.classes[best];
}

SvmModel svm_train(const MatD& x, std::span<const int> labels, const SvmParams& params) {
    if (labels.size() != size_t(x.rows))
        fail(ErrorCode::DimMismatch, "one label per row required");
    std::vector<int> classes(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (classes.size() < 2) fail(ErrorCode::DegenerateLabels, "need at least two classes");

    const int n = x.rows;
    MatD gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            gram(i, j) = gram(j, i) = kernel_eval(params, row(x, i), row(x, j));

    SvmModel model;
    model.params = params;
    model.classes = classes;
    model.x = x;
    for (int cls : classes) {
        std::vector<int> y(n);
        for (int i = 0; i < n; ++i) y[i] = labels[i] == cls ? 1 : -1;
        auto [alpha, bias] = smo_solve(gram, y, params);
        std::vector<double> coef(n);
        for (int i = 0; i < n; ++i) coef[i] = alpha[i] * y[i];
        model.coef.push_back(std::move(coef));
        model.bias.push_back(bias);
    }
    return model;
}

std::vector<double> svm_decision(const SvmModel& model, std::span<const double> x) {
    if (x.size() != size_t(model.x.cols))
        fail(ErrorCode::DimMismatch, "probe dimension differs from training");
    std::vector<double> kx(model.x.rows);
    for (int i = 0; i < model.x.rows; ++i)
        kx[i] = kernel_eval(model.params, row(model.x, i), x);
    std::vector<double> out;
    for (size_t m = 0; m < model.classes.size(); ++m) {
        double s = model.bias[m];
        for (int i = 0; i < model.x.rows; ++i) s += model.coef[m][i] * kx[i];
        out.push_back(s);
    }
    return out;
}

int svm_predict(const SvmModel& model, std::span<const double> x) {
    const std::vector<double> d = svm_decision(model, x);
    int best = 0;
    for (size_t m = 1; m < d.size(); ++m)
        if (d[m] > d[best]) best = int(m);
    return model.classes[best];
}

} // namespace irisct

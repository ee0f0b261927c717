#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "irisct/features.hpp"
#include "irisct/mat.hpp"

namespace irisct {

struct MatchResult {
    double distance = 0;
    double threshold = 0;
    bool accept = false;
};

/// The accept threshold at the intra/inter separation point.
inline constexpr double kBinaryThreshold = 0.42;
inline constexpr double kCascadeLocalLo = 0.30;
inline constexpr double kCascadeLocalHi = 0.50;

/// Fractional Hamming distance over jointly valid positions. Empty masks
/// mean all-valid. Throws Error{DimMismatch} on length disagreement and
/// Error{EmptyMask} when no position is valid in both.
double hamming(std::span<const int8_t> a, std::span<const int8_t> b,
               std::span<const uint8_t> mask_a = {}, std::span<const uint8_t> mask_b = {});

/// Fraction of positions where the trit codes disagree.
double trit_distance(std::span<const int8_t> a, std::span<const int8_t> b);

double euclidean(std::span<const double> a, std::span<const double> b);

/// Two-stage decision on combined templates: clear accept below t_local_lo
/// on the trit prefix, clear reject at or above t_local_hi, and the
/// Euclidean distance of the statistics suffix against t_global in between.
MatchResult cascade_match(const FeatureVector& probe, const FeatureVector& gallery,
                          double t_local_lo = kCascadeLocalLo,
                          double t_local_hi = kCascadeLocalHi, double t_global = 1.0);

/// Distance of a probe's full sign code against a sparse template: fraction
/// of disagreeing bits at the template's significant positions.
double nlac_distance(const FeatureVector& gallery, std::span<const int8_t> probe_sign_code);

/// Nearest class mean under Euclidean distance, ties to the lowest class.
struct CentroidModel {
    std::vector<int> classes;
    MatD centers;  // one row per class
};
CentroidModel centroid_train(const MatD& x, std::span<const int> labels);
int centroid_predict(const CentroidModel& model, std::span<const double> x);

struct SvmParams {
    enum class Kernel { Linear, Rbf };
    double c = 10.0;
    Kernel kernel = Kernel::Linear;
    double gamma = 0.5;   // rbf exponent scale
    double tol = 1e-3;    // KKT violation stop
    int max_iter = 100000;
};

/// One-vs-rest maximum-margin classifier. Training solves each binary dual
/// by most-violating-pair coordinate ascent; fully deterministic.
struct SvmModel {
    SvmParams params;
    std::vector<int> classes;
    MatD x;                                  // training rows
    std::vector<std::vector<double>> coef;   // per class: alpha_i * y_i
    std::vector<double> bias;                // per class
};

/// Throws Error{DegenerateLabels} with fewer than two distinct labels and
/// Error{DimMismatch} when labels and rows disagree.
SvmModel svm_train(const MatD& x, std::span<const int> labels, const SvmParams& params = {});

/// Per-class decision values, same order as model.classes.
std::vector<double> svm_decision(const SvmModel& model, std::span<const double> x);

/// Argmax class, ties to the lowest class index.
int svm_predict(const SvmModel& model, std::span<const double> x);

} // namespace irisct

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "irisct/classify.hpp"
#include "irisct/dataset.hpp"
#include "irisct/features.hpp"
#include "irisct/gaselect.hpp"
#include "irisct/segment.hpp"

namespace irisct {

/// The eleven methods in reporting order.
std::span<const FeatureMethod> all_methods();

/// Runs one method's extractor on a strip. The ga600 source yields its 600
/// coarse-scale sign bits as codes. Pca/Ica need a fitted basis
/// (fit_projection + feat_project) and are rejected with Error{BadConfig}.
FeatureVector extract_feature(FeatureMethod m, const Strip& strip);

struct EvalOptions {
    std::vector<FeatureMethod> methods;  // empty = all_methods()
    uint64_t seed = 1;                   // drives the GA and Ica inits
    int shift_range = 4;                 // rotation search, columns each way
    double verify_threshold = kBinaryThreshold;
    int projection_dim = kProjectionDim;  // clipped to the data rank per run
    int radial_res = kRadialRes;
    int angular_res = kAngularRes;
    SegmentParams segment;
    GAParams ga;  // structural GA parameters; rng_seed is taken from seed
    SvmParams svm;
};

/// One report line. Identification rows ("id", one per method) count
/// rank-1 hits of the probe sessions against the session-1 gallery;
/// n_ref/n_probe are gallery and probe image counts. The sign-code method
/// adds a verification row ("verify") over every unordered image pair at
/// the threshold; there n_ref/n_probe are the intra and inter pair counts
/// and the distance means are filled.
struct EvalRow {
    std::string kind;
    FeatureMethod method = FeatureMethod::Glcm21;
    std::string matcher;
    size_t length = 0;
    int n_ref = 0;
    int n_probe = 0;
    int n_correct = 0;
    double accuracy = 0;
    double intra_mean = 0;
    double inter_mean = 0;
    bool has_means = false;
    double extract_ms = 0;  // mean wall time per image, id rows only
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::vector<double> intra;  // sign-code pair distances, pair scan order
    std::vector<double> inter;
    int n_images = 0;           // images that segmented and normalized
    std::vector<std::string> failures;  // "path: error" for skipped images
};

/// Enrolls session 1 as the gallery and probes the later sessions. Code
/// methods match by the minimum distance over column shifts of the probe
/// strip in [-shift_range, shift_range]; real-valued methods train a linear
/// one-vs-rest margin classifier on the gallery. Images that fail to
/// segment are recorded and skipped. Deterministic for a fixed seed except
/// the extract_ms column.
/// Throws Error{DegenerateSplit} when either side of the split is empty.
EvalReport evaluate(const DatasetIndex& idx, const EvalOptions& opt = {});

/// Serializes the rows to CSV. include_timing=false omits the extract_ms
/// column, leaving only reproducible fields.
std::string report_csv(const EvalReport& report, bool include_timing);

/// Fixed-bin histogram as "bin_lo,bin_hi,count" lines. Values land in
/// [lo, hi); the edge bins absorb anything outside.
std::string histogram_csv(std::span<const double> values, int n_bins = 50, double lo = 0.0,
                          double hi = 1.0);

} // namespace irisct

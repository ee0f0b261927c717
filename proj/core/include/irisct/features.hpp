#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "irisct/contourlet.hpp"
#include "irisct/mat.hpp"
#include "irisct/normalize.hpp"

namespace irisct {

enum class FeatureMethod {
    Glcm21,
    Glcm56,
    Local,
    Global,
    Combined,
    Binary,
    Nlac,
    Ga600,
    Aad,
    Pca,
    Ica,
};

const char* to_string(FeatureMethod m);

/// Inverse of to_string; nullopt for an unknown tag.
std::optional<FeatureMethod> method_from_tag(std::string_view tag);

/// One extracted template. Real-valued methods fill `reals`; bit and trit
/// methods fill `codes` (values 0/1 or -1/0/1). `mask` parallels `codes`
/// where validity tracking applies (1 = trustworthy position). For Nlac,
/// `indices` holds the positions of the significant coefficients, sorted
/// ascending, and `codes` holds the sign bits at those positions.
struct FeatureVector {
    FeatureMethod method = FeatureMethod::Glcm21;
    std::vector<double> reals;
    std::vector<int8_t> codes;
    std::vector<uint8_t> mask;
    std::vector<int32_t> indices;

    size_t length() const { return reals.size() + codes.size(); }
};

/// Gray-tone co-occurrence distribution over an 8-level image, with the
/// marginal statistics used by the correlation feature. Indices are treated
/// as 1-based values 1..8 in all moment formulas.
struct Glcm {
    MatD p;  // 8x8, sums to 1
    double mu_x = 0, mu_y = 0, sigma_x = 0, sigma_y = 0;
};

inline constexpr int kGlcmLevels = 8;

/// Pair-counting joint distribution for one displacement. Counts ordered
/// pairs (m(y,x), m(y+dy, x+dx)) over in-bounds positions.
/// Throws Error{EmptyOverlap} when the offset leaves no pairs and
/// Error{SpecOutOfBounds} for entries outside 0..7 or a zero offset.
Glcm glcm_compute(const MatI& m, int dy, int dx);

/// Same, with pair counts accumulated over several displacements before
/// normalizing. Used by the texture extractors with the three unit offsets
/// at 0, 45 and 90 degrees.
Glcm glcm_accumulate(const MatI& m, std::span<const std::pair<int, int>> offsets);

/// The displacement set shared by the co-occurrence extractors.
std::span<const std::pair<int, int>> glcm_standard_offsets();

/// Energy, contrast, correlation, homogeneity, autocorrelation,
/// dissimilarity, inertia, in that order. Correlation is 0 when either
/// marginal deviation vanishes.
std::array<double, 7> haralick7(const Glcm& g);

/// Linear binning of [min, max] into 8 equal bins; constant input maps to
/// bin 0. Throws Error{SpecOutOfBounds} on non-finite entries.
MatI quantize8(const MatD& m);

/// Three co-occurrence summaries over the two-level pyramid: the coarse
/// directional subbands flattened into a 4x120 matrix, the fine pair
/// stacked into 16x120, and their vertical concatenation. 7 features each,
/// 21 total.
FeatureVector feat_glcm21(const Strip& strip);

/// Per-subband co-occurrence summaries of the eight finest-partition
/// directional subbands of the three-level pyramid. 8 x 7 = 56.
FeatureVector feat_glcm56(const Strip& strip);

/// Trit code over all 2520 two-level coefficients: +1 at strict positive
/// local maxima, -1 at strict negative local minima, 0 elsewhere.
FeatureVector feat_local(const Strip& strip);

/// Mean and population variance of each of the 12 directional subbands in
/// the two coarser levels of the three-level pyramid. 24 values.
FeatureVector feat_global(const Strip& strip);

/// Entry count of feat_global, which is also the real-valued tail of
/// feat_combined.
inline constexpr int kGlobalLength = 24;

/// feat_local followed by feat_global, 2520 trits + 24 reals.
FeatureVector feat_combined(const Strip& strip);

/// Sign bit of every two-level coefficient in canonical order, with a
/// validity mask derived from the strip mask by per-subband block AND.
FeatureVector feat_binary(const Strip& strip);

/// Sign bits at the positions of the 48 largest-magnitude two-level
/// coefficients; the position set ships with the template.
FeatureVector feat_nlac(const Strip& strip);

/// Number of significant coefficients for a given pixel count: 2.5 percent,
/// rounded half away from zero.
int nlac_count(int n_pixel);

/// Blockwise average absolute deviation over the eight full-rate
/// third-level directional responses, 160 blocks of 12 samples per
/// direction, 1280 values.
FeatureVector feat_aad(const Strip& strip);

/// Average absolute deviation about the mean of one block.
double average_absolute_deviation(std::span<const double> block);

/// Trit coder and sign coder over an already-built pyramid, exposed so the
/// coding rules are testable on constructed inputs.
std::vector<int8_t> local_code(const ct::ContourletPyramid& p);
std::vector<int8_t> sign_code(const ct::ContourletPyramid& p);

/// Per-coefficient validity for a pyramid, aligned with ct::flatten order,
/// from a strip-domain mask.
std::vector<uint8_t> flat_coefficient_mask(const ct::ContourletPyramid& p,
                                           const MatU8& strip_mask);

/// Linear projection basis fitted on training vectors.
struct ProjectionBasis {
    enum class Kind { Pca, Ica };
    Kind kind = Kind::Pca;
    std::vector<double> mean;  // input dimension
    MatD components;           // k x d, rows are components
    bool converged = true;     // false when the Ica iteration cap was hit
};

/// Fits a PCA or ICA basis. k is clipped to min(d, n-1) with a warning on
/// stderr when the request exceeds the data rank. ICA runs a fixed-point
/// symmetric iteration on whitened data, deterministic for a fixed seed.
/// Throws Error{InsufficientData} for fewer than two vectors or mixed dims.
ProjectionBasis fit_projection(const std::vector<std::vector<double>>& training,
                               ProjectionBasis::Kind kind, int k, uint64_t seed = 1);

/// The projection input representation: the eight finest-partition subbands
/// of the critically sampled three-level pyramid, flattened canonically.
std::vector<double> projection_input(const Strip& strip);

/// Projects a strip through the basis: components * (x - mean).
/// Throws Error{DimMismatch} when the basis was built for another dim.
FeatureVector feat_project(const Strip& strip, const ProjectionBasis& basis);

/// The published projection output dimension.
inline constexpr int kProjectionDim = 1100;

} // namespace irisct

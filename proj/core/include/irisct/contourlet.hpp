#pragma once

#include <utility>
#include <vector>

#include "irisct/error.hpp"
#include "irisct/mat.hpp"

namespace irisct::ct {

/// Per-axis boundary extension for the pyramid filters. The angular axis of
/// an unwrapped iris strip is physically periodic, so columns default to
/// periodic and rows to whole-point symmetric.
struct Boundary {
    bool rows_periodic = false;
    bool cols_periodic = true;
};

struct PyramidConfig {
    int levels = 3;
    std::vector<int> dirs_per_level = {2, 4, 8};  // finest to coarsest
    Boundary boundary;
};

struct ContourletPyramid {
    MatD lowpass;                         // coarsest residual
    std::vector<std::vector<MatD>> bands; // bands[level][direction], level 0 = finest
    PyramidConfig config;
    int source_rows = 0;
    int source_cols = 0;
};

/// One 9/7 pyramid step: lowpass is ceil(r/2) x ceil(c/2), bandpass keeps the
/// input size. Throws Error{TooSmall} below 2x2.
std::pair<MatD, MatD> lp_decompose(const MatD& x, Boundary b = {});

/// Exact inverse of lp_decompose. Throws Error{DimMismatch}.
MatD lp_reconstruct(const MatD& lowpass, const MatD& bandpass, Boundary b = {});

/// Splits into n_dirs critically sampled directional subbands, ordered by
/// ascending orientation angle. n_dirs must be 2, 4 or 8
/// (Error{UnsupportedDirectionCount}); odd dimensions are padded internally.
std::vector<MatD> dfb_decompose(const MatD& x, int n_dirs);

/// Inverse of dfb_decompose given the original dimensions.
MatD dfb_reconstruct(const std::vector<MatD>& subbands, int rows, int cols);

/// Convenience overload that infers the original dimensions; valid when the
/// decomposed matrix divided evenly (no internal padding).
MatD dfb_reconstruct(const std::vector<MatD>& subbands);

ContourletPyramid ct_decompose(const MatD& x, const PyramidConfig& cfg = {});
MatD ct_reconstruct(const ContourletPyramid& p);

/// Coefficients in the canonical order: lowpass row-major first, then levels
/// coarse to fine, directions ascending, each subband row-major.
std::vector<double> flatten(const ContourletPyramid& p);

size_t coefficient_count(const ContourletPyramid& p);

/// Shrinks a validity mask to sub_rows x sub_cols by AND over the source
/// block covering each target cell.
MatU8 block_and_mask(const MatU8& mask, int sub_rows, int sub_cols);

/// Undecimated pyramid: full-rate bandpass images (finest first) plus the
/// full-rate lowpass, using filters upsampled with zero gaps per level.
struct AtrousPyramid {
    std::vector<MatD> bands;
    MatD lowpass;
};
AtrousPyramid atrous_decompose(const MatD& x, int levels, Boundary b = {});

/// Undecimated directional split: n_dirs full-rate responses of x, same
/// orientation order as dfb_decompose. Analysis only (no reconstruction).
std::vector<MatD> nsdfb_decompose(const MatD& x, int n_dirs);

} // namespace irisct::ct

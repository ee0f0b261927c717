#pragma once

#include "irisct/image.hpp"
#include "irisct/mat.hpp"
#include "irisct/segment.hpp"

namespace irisct {

/// Polar unwrap of the collarette annulus: rows run from the pupil boundary
/// outward, columns run counterclockwise from the +x axis and wrap around.
/// Intensities are scaled to [0,1]; entries with mask 0 carry data 0.
struct NormalizedIris {
    MatD data;
    MatU8 mask;
    int radial_res = 0;
    int angular_res = 0;
};

/// The eight consistent mid rows of a NormalizedIris (rows 5 through 12,
/// counting from 1), kept with their validity mask. 8 x 240 = 1920 pixels
/// at the default resolutions.
struct Strip {
    MatD data;
    MatU8 mask;
};

inline constexpr int kRadialRes = 20;
inline constexpr int kAngularRes = 240;
inline constexpr int kStripRows = 8;
inline constexpr int kStripFirstRow = 4;  // zero-based row 4 = row 5 counting from 1

/// Daugman rubber sheet over the collarette annulus: for each angle the ray
/// from the pupil center is sampled at radial_res evenly spaced points
/// between the pupil and collarette boundaries, bilinear in the source.
/// Mask is 0 on the two border rows, outside the image, and wherever the
/// segmentation's noise mask rejects the source pixel.
/// Throws Error{DegenerateGeometry} when the collarette does not leave a
/// positive-width annulus.
NormalizedIris rubber_sheet(const GrayImage& img, const Segmentation& seg,
                            int radial_res = kRadialRes, int angular_res = kAngularRes);

/// Rows 5 through 12 (1-based) of the unwrap, masks carried over.
/// Throws Error{TooFewRows} when radial_res < 12.
Strip mid_strip(const NormalizedIris& n);

/// The strip with every row rotated by `shift` columns: column c of the
/// result reads column (c + shift) mod cols of the input, so a positive
/// shift models a counterclockwise eye rotation. The mask rotates along.
Strip rotate_columns(const Strip& s, int shift);

} // namespace irisct

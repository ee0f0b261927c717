#pragma once

#include <utility>
#include <vector>

#include "irisct/image.hpp"
#include "irisct/mat.hpp"

namespace irisct {

struct Circle {
    double cx = 0;
    double cy = 0;
    double r = 0;
};

/// Line in implicit form a*x + b*y = c with (a, b) unit length.
struct EyelidLine {
    double a = 0;
    double b = 1;
    double c = 0;
};

struct Segmentation {
    Circle pupil;
    Circle iris;
    Circle collarette;
    std::vector<EyelidLine> eyelid_lines;  // at most one upper, one lower
    MatU8 noise_mask;  // 1 = usable iris pixel, dims follow the source image
};

struct SegmentParams {
    double r_min = 15;
    double r_max = 120;
    double id_sigma = 1.5;           // radial derivative smoothing
    double id_floor = 2.0;           // minimum peak response, intensity units
    double collarette_fraction = 0.5;
    double hough_vote_floor = 40;
    double gabor_threshold = 50;
    double variance_threshold = 2.0;
    int eyelash_window = 9;
};

/// Finds the pupil and iris boundary circles by maximizing the smoothed
/// radial derivative of the mean contour intensity, coarse-to-fine. The
/// pupil is searched first over the whole image among dark-interior
/// candidates; the iris search is then confined to centers within 15 px of
/// the pupil center, radii above the pupil's, scoring only the left and
/// right quarter arcs so eyelids cannot pull the boundary.
/// Throws Error{NoBoundaryFound} when no peak clears the response floor.
std::pair<Circle, Circle> locate_pupil_iris(const GrayImage& img, double r_min, double r_max,
                                            double id_sigma = 1.5, double id_floor = 2.0);

/// Fits up to one upper and one lower eyelid line by a linear Hough
/// transform over strong vertical-gradient points inside the iris circle.
/// Lines whose peak falls below vote_floor are dropped; an empty result is
/// a valid outcome.
std::vector<EyelidLine> detect_eyelids(const GrayImage& img, const Circle& pupil,
                                       const Circle& iris, double vote_floor = 40);

/// Marks probable eyelash pixels: low magnitude of a horizontal Gabor
/// response (thin separable lashes) or a low-variance window whose mean is
/// below the image median (matted lashes). Returns 1 where masked.
MatU8 detect_eyelashes(const GrayImage& img, double gabor_threshold, double variance_threshold,
                       int window);

/// Collarette circle: centered on the pupil, radius pupil.r plus the given
/// fraction of the pupil-to-iris band.
Circle isolate_collarette(const Circle& pupil, const Circle& iris, double fraction);

/// Runs the full boundary/eyelid/eyelash chain and assembles the usable
/// pixel mask over the collarette annulus.
Segmentation segment_eye(const GrayImage& img, const SegmentParams& params = {});

} // namespace irisct

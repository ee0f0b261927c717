#include "irisct/normalize.hpp"

#include <cmath>

namespace irisct {

NormalizedIris rubber_sheet(const GrayImage& img, const Segmentation& seg, int radial_res,
                            int angular_res) {
    if (radial_res < 13)
        fail(ErrorCode::SpecOutOfBounds, "radial_res must be at least 13");
    if (angular_res < 8)
        fail(ErrorCode::SpecOutOfBounds, "angular_res must be at least 8");
    if (seg.collarette.r <= seg.pupil.r)
        fail(ErrorCode::DegenerateGeometry, "collarette radius not beyond the pupil");

    NormalizedIris out;
    out.radial_res = radial_res;
    out.angular_res = angular_res;
    out.data = MatD(radial_res, angular_res);
    out.mask = MatU8(radial_res, angular_res);

    bool have_noise = seg.noise_mask.rows == img.height && seg.noise_mask.cols == img.width;
    for (int j = 0; j < angular_res; ++j) {
        double th = 2.0 * M_PI * j / angular_res;
        double dx = std::cos(th);
        double dy = std::sin(th);
        double r0 = seg.pupil.r;
        double r1 = seg.collarette.r;
        for (int i = 0; i < radial_res; ++i) {
            double t = static_cast<double>(i) / (radial_res - 1);
            double rho = r0 + t * (r1 - r0);
            double x = seg.pupil.cx + rho * dx;
            double y = seg.pupil.cy + rho * dy;
            bool valid = i != 0 && i != radial_res - 1;  // boundary rows excluded
            valid = valid && x >= 0 && y >= 0 && x <= img.width - 1 && y <= img.height - 1;
            if (valid && have_noise) {
                int xi = static_cast<int>(std::lround(x));
                int yi = static_cast<int>(std::lround(y));
                valid = seg.noise_mask(yi, xi) != 0;
            }
            if (valid) {
                out.data(i, j) = img.sample(x, y) / 255.0;
                out.mask(i, j) = 1;
            }
        }
    }
    return out;
}

Strip mid_strip(const NormalizedIris& n) {
    if (n.radial_res < kStripFirstRow + kStripRows)
        fail(ErrorCode::TooFewRows, "unwrap has fewer than 12 radial rows");
    Strip s;
    s.data = MatD(kStripRows, n.angular_res);
    s.mask = MatU8(kStripRows, n.angular_res);
    for (int i = 0; i < kStripRows; ++i)
        for (int j = 0; j < n.angular_res; ++j) {
            s.data(i, j) = n.data(kStripFirstRow + i, j);
            s.mask(i, j) = n.mask(kStripFirstRow + i, j);
        }
    return s;
}

Strip rotate_columns(const Strip& s, int shift) {
    if (shift == 0) return s;
    const int cols = s.data.cols;
    Strip out;
    out.data = MatD(s.data.rows, cols);
    if (!s.mask.empty()) out.mask = MatU8(s.mask.rows, cols);
    for (int r = 0; r < s.data.rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int src = ((c + shift) % cols + cols) % cols;
            out.data(r, c) = s.data(r, src);
            if (!out.mask.empty()) out.mask(r, c) = s.mask(r, src);
        }
    return out;
}

} // namespace irisct

#include "irisct/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace irisct {
namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

uint64_t hash_combine(uint64_t a, uint64_t b) {
    return splitmix64(a ^ (0x9E3779B97F4A7C15ull + b + (a << 6) + (a >> 2)));
}

// Uniform in [-1, 1].
double hash_unit(uint64_t h) {
    return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

double lattice_value(uint64_t seed, int64_t xi, int64_t yi) {
    uint64_t h = hash_combine(seed, static_cast<uint64_t>(xi) * 0x8DA6B343ull +
                                        static_cast<uint64_t>(yi) * 0xD8163841ull);
    return hash_unit(h);
}

double smoothstep01(double t) { return t * t * (3.0 - 2.0 * t); }

double smoothstep(double e0, double e1, double x) {
    double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
    return smoothstep01(t);
}

// Band-limited value noise: bilinear blend of hashed lattice values with
// smoothstep weights, lattice spacing 1 in the given coordinates.
double value_noise(uint64_t seed, double x, double y) {
    double fx = std::floor(x);
    double fy = std::floor(y);
    int64_t xi = static_cast<int64_t>(fx);
    int64_t yi = static_cast<int64_t>(fy);
    double tx = smoothstep01(x - fx);
    double ty = smoothstep01(y - fy);
    double v00 = lattice_value(seed, xi, yi);
    double v10 = lattice_value(seed, xi + 1, yi);
    double v01 = lattice_value(seed, xi, yi + 1);
    double v11 = lattice_value(seed, xi + 1, yi + 1);
    double top = v00 + (v10 - v00) * tx;
    double bot = v01 + (v11 - v01) * tx;
    return top + (bot - top) * ty;
}

// Iris texture in iris-relative coordinates (u, v) = ((x-cx)/r, (y-cy)/r),
// so a rescaled spec reproduces the same pattern at the new size.
double iris_texture(uint64_t seed, double u, double v) {
    struct Octave {
        double wavelength;  // in units of iris radius, referenced to r=120
        double amplitude;
    };
    static const Octave octaves[] = {
        {16.0 / 120.0, 18.0},
        {8.0 / 120.0, 11.0},
        {5.0 / 120.0, 6.0},
    };
    double t = 0.0;
    int k = 0;
    for (const Octave& o : octaves) {
        t += o.amplitude * value_noise(hash_combine(seed, 0x51ED00 + k), u / o.wavelength,
                                       v / o.wavelength);
        ++k;
    }
    return t;
}

constexpr double kPupilShade = 25.0;
constexpr double kIrisShade = 120.0;
constexpr double kScleraShade = 215.0;
constexpr double kSkinShade = 195.0;
constexpr double kEdgeHalfWidth = 1.25;
constexpr double kSensorNoiseGain = 30.0;

void validate(const SynthEyeSpec& s, int width, int height) {
    if (width <= 0 || height <= 0)
        fail(ErrorCode::SpecOutOfBounds, "non-positive image dimensions");
    if (s.pupil.r <= 0 || s.iris.r <= 0)
        fail(ErrorCode::SpecOutOfBounds, "non-positive radius");
    double dc = std::hypot(s.pupil.cx - s.iris.cx, s.pupil.cy - s.iris.cy);
    if (dc + s.pupil.r >= s.iris.r)
        fail(ErrorCode::SpecOutOfBounds, "pupil circle not strictly inside iris circle");
    if (s.iris.cx - s.iris.r < 0 || s.iris.cx + s.iris.r > width - 1 ||
        s.iris.cy - s.iris.r < 0 || s.iris.cy + s.iris.r > height - 1)
        fail(ErrorCode::SpecOutOfBounds, "iris circle does not fit inside the image");
    if (s.noise_level < 0 || s.noise_level > 1)
        fail(ErrorCode::SpecOutOfBounds, "noise_level outside [0,1]");
    if (s.eyelid_occlusion < 0 || s.eyelid_occlusion > 1)
        fail(ErrorCode::SpecOutOfBounds, "eyelid_occlusion outside [0,1]");
}

} // namespace

SynthEyelids synth_eyelid_lines(const SynthEyeSpec& spec) {
    SynthEyelids out;
    double o = spec.eyelid_occlusion;
    if (o > 0.0) out.upper_y = spec.iris.cy - spec.iris.r + o * spec.iris.r;
    double lower_pen = std::max(0.0, 2.0 * o - 1.0);
    if (lower_pen > 0.0) out.lower_y = spec.iris.cy + spec.iris.r - lower_pen * spec.iris.r;
    return out;
}

GrayImage synth_eye_rotated(const SynthEyeSpec& spec, int width, int height, double rot) {
    validate(spec, width, height);
    GrayImage img(width, height);

    SynthEyelids lids = synth_eyelid_lines(spec);
    uint64_t tex_seed = splitmix64(spec.texture_seed);
    uint64_t sensor_seed =
        hash_combine(tex_seed, 0xA5A5u ^ static_cast<uint64_t>(spec.noise_level * 1e6));
    double cosr = std::cos(-rot);
    double sinr = std::sin(-rot);

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            // Eyeball coordinates: rotate about the pupil center.
            double dx = x - spec.pupil.cx;
            double dy = y - spec.pupil.cy;
            double xr = spec.pupil.cx + dx * cosr - dy * sinr;
            double yr = spec.pupil.cy + dx * sinr + dy * cosr;

            double d_iris = std::hypot(xr - spec.iris.cx, yr - spec.iris.cy);
            double d_pupil = std::hypot(xr - spec.pupil.cx, yr - spec.pupil.cy);

            double u = (xr - spec.iris.cx) / spec.iris.r;
            double v = (yr - spec.iris.cy) / spec.iris.r;
            double iris_val = kIrisShade + iris_texture(tex_seed, u, v);

            double w_iris = 1.0 - smoothstep(spec.iris.r - kEdgeHalfWidth,
                                             spec.iris.r + kEdgeHalfWidth, d_iris);
            double shade = kScleraShade + (iris_val - kScleraShade) * w_iris;
            double w_pupil = 1.0 - smoothstep(spec.pupil.r - kEdgeHalfWidth,
                                              spec.pupil.r + kEdgeHalfWidth, d_pupil);
            shade += (kPupilShade - shade) * w_pupil;

            // Eyelids stay fixed in the image frame.
            if (lids.upper_y) {
                double w = 1.0 - smoothstep(*lids.upper_y - kEdgeHalfWidth,
                                            *lids.upper_y + kEdgeHalfWidth, static_cast<double>(y));
                shade += (kSkinShade - shade) * w;
            }
            if (lids.lower_y) {
                double w = smoothstep(*lids.lower_y - kEdgeHalfWidth,
                                      *lids.lower_y + kEdgeHalfWidth, static_cast<double>(y));
                shade += (kSkinShade - shade) * w;
            }

            if (spec.noise_level > 0.0) {
                uint64_t h = hash_combine(sensor_seed,
                                          static_cast<uint64_t>(y) * 131071u +
                                              static_cast<uint64_t>(x));
                shade += spec.noise_level * kSensorNoiseGain * hash_unit(h);
            }

            img.at(x, y) = static_cast<uint8_t>(std::lround(std::clamp(shade, 0.0, 255.0)));
        }
    }
    return img;
}

GrayImage synth_eye(const SynthEyeSpec& spec, int width, int height) {
    return synth_eye_rotated(spec, width, height, 0.0);
}

SynthEyeSpec corpus_eye_spec(const SynthCorpusSpec& spec, int subject, int sample) {
    uint64_t subj_h = hash_combine(splitmix64(spec.seed), static_cast<uint64_t>(subject));
    uint64_t samp_h = hash_combine(subj_h, 0x53u + static_cast<uint64_t>(sample));

    SynthEyeSpec eye;
    eye.texture_seed = hash_combine(subj_h, 0x7E57u);
    double dim = std::min(spec.width, spec.height);
    double base_iris = dim * (0.29 + 0.002 * static_cast<double>((subj_h >> 8) % 18));
    double base_pupil = base_iris * (0.30 + 0.01 * static_cast<double>(subj_h % 7));
    eye.pupil.r = base_pupil + 2.0 * hash_unit(hash_combine(samp_h, 1));
    eye.iris.r = base_iris + 1.5 * hash_unit(hash_combine(samp_h, 2));
    eye.iris.cx = spec.width / 2.0 + 4.0 * hash_unit(hash_combine(samp_h, 3));
    eye.iris.cy = spec.height / 2.0 + 4.0 * hash_unit(hash_combine(samp_h, 4));
    eye.pupil.cx = eye.iris.cx + 2.0 * hash_unit(hash_combine(samp_h, 5));
    eye.pupil.cy = eye.iris.cy + 2.0 * hash_unit(hash_combine(samp_h, 6));
    eye.noise_level = spec.noise_level;
    eye.eyelid_occlusion = (sample % 3 == 2) ? spec.occlusion : 0.0;
    return eye;
}

double corpus_eye_rotation(const SynthCorpusSpec& spec, int subject, int sample) {
    uint64_t subj_h = hash_combine(splitmix64(spec.seed), static_cast<uint64_t>(subject));
    uint64_t samp_h = hash_combine(subj_h, 0x53u + static_cast<uint64_t>(sample));
    // Up to ±2.5 columns of a 240-column unwrap.
    return 2.5 * (2.0 * 3.14159265358979323846 / 240.0) * hash_unit(hash_combine(samp_h, 7));
}

std::string make_synth_corpus(const std::filesystem::path& root, const SynthCorpusSpec& spec) {
    namespace fs = std::filesystem;
    int session1_count = (spec.samples_per_subject + 1) / 2;
    for (int s = 1; s <= spec.n_subjects; ++s) {
        char subj[16];
        std::snprintf(subj, sizeof subj, "%03d", s);
        for (int k = 0; k < spec.samples_per_subject; ++k) {
            int session = k < session1_count ? 1 : 2;
            int idx = session == 1 ? k + 1 : k - session1_count + 1;
            fs::path dir = root / subj / std::to_string(session);
            fs::create_directories(dir);
            SynthEyeSpec eye = corpus_eye_spec(spec, s, k);
            GrayImage img = synth_eye_rotated(eye, spec.width, spec.height,
                                              corpus_eye_rotation(spec, s, k));
            fs::path file = dir / (std::string(subj) + "_" + std::to_string(session) + "_" +
                                   std::to_string(idx) + ".png");
            io::save_image(img, file);
        }
    }
    return "{subject}/{session}/{subject}_{session}_{sample}.png";
}

} // namespace irisct

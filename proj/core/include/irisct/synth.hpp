#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "irisct/image.hpp"

namespace irisct {

struct SynthCircle {
    double cx = 0;
    double cy = 0;
    double r = 0;
};

/// Ground-truth description of a rendered eye. Two renders of the same spec
/// are bit-identical; distinct texture seeds give decorrelated iris texture.
struct SynthEyeSpec {
    SynthCircle pupil;
    SynthCircle iris;
    uint64_t texture_seed = 0;
    double noise_level = 0.0;       // additive per-pixel noise, 0..1
    double eyelid_occlusion = 0.0;  // chord coverage of the iris, 0..1
};

/// Horizontal eyelid chords drawn by synth_eye, as ground truth for
/// line-detection tests. Values are image y coordinates.
struct SynthEyelids {
    std::optional<double> upper_y;
    std::optional<double> lower_y;
};

SynthEyelids synth_eyelid_lines(const SynthEyeSpec& spec);

/// Renders the eye described by spec. Throws Error{SpecOutOfBounds} when the
/// circles do not fit inside the image or a field is outside its range.
GrayImage synth_eye(const SynthEyeSpec& spec, int width, int height);

/// Same scene with the eyeball (boundaries and texture) rotated by rot
/// radians about the pupil center; eyelid chords and sensor noise stay fixed
/// to the image frame.
GrayImage synth_eye_rotated(const SynthEyeSpec& spec, int width, int height, double rot);

/// Parameters for a generated dataset tree. Each subject keeps one texture
/// seed across samples; per-sample jitter moves the eye, dilates the pupil
/// and rotates the eyeball slightly.
struct SynthCorpusSpec {
    int n_subjects = 5;
    int samples_per_subject = 4;
    uint64_t seed = 1;
    int width = 320;
    int height = 280;
    double noise_level = 0.04;
    double occlusion = 0.0;  // applied to every third sample
};

/// Writes width×height PNG files under root following
/// {subject}/{session}/{subject}_{session}_{sample}.png with zero-padded
/// 3-digit subject ids. The first half of each subject's samples is
/// session 1, the rest session 2. Returns the layout pattern used.
std::string make_synth_corpus(const std::filesystem::path& root, const SynthCorpusSpec& spec);

/// The eye spec make_synth_corpus renders for one (subject, sample) slot;
/// exposed so tests can compare recovered geometry against ground truth.
SynthEyeSpec corpus_eye_spec(const SynthCorpusSpec& spec, int subject, int sample);

/// The eyeball rotation applied to that slot, in radians.
double corpus_eye_rotation(const SynthCorpusSpec& spec, int subject, int sample);

} // namespace irisct

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "irisct/classify.hpp"
#include "irisct/eval.hpp"
#include "irisct/gaselect.hpp"
#include "irisct/normalize.hpp"
#include "irisct/segment.hpp"

namespace irisct::cli {

/// Every tunable of the pipeline in one place. The defaults are the
/// published operating point, so an empty config runs the reference setup
/// and a config file only needs the keys it changes. The single `seed`
/// drives the genetic search and the projection fits; ga.rng_seed is not a
/// separate key.
struct RunConfig {
    int radial_res = kRadialRes;
    int angular_res = kAngularRes;
    SegmentParams segment;
    GAParams ga;
    SvmParams svm;
    double verify_threshold = kBinaryThreshold;
    double cascade_local_lo = kCascadeLocalLo;
    double cascade_local_hi = kCascadeLocalHi;
    int shift_range = 4;
    int projection_dim = kProjectionDim;
    uint64_t seed = 1;
};

/// Applies one key=value setting. Keys are flat with a dotted group prefix
/// for the nested parameter blocks (segment.r_min, ga.pop_size, svm.c, ...).
/// Throws Error{BadConfig} for an unknown key or an unparseable value.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Reads a flat key=value file: one setting per line, '#' starts a comment,
/// blank lines are skipped, later lines win. Throws Error{FileNotFound} when
/// the file cannot be opened and Error{BadConfig} with the offending line
/// number otherwise.
RunConfig load_config(const std::filesystem::path& path);

/// The evaluation options a config stands for (methods left empty).
EvalOptions eval_options(const RunConfig& cfg);

} // namespace irisct::cli

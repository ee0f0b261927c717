#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "irisct/dataset.hpp"
#include "irisct/features.hpp"
#include "irisct_cli/config.hpp"

namespace irisct::cli {

/// Parses a method tag ("glcm21" ... "ica").
/// Throws Error{BadConfig} for an unknown tag.
FeatureMethod parse_method(const std::string& tag);

struct SegmentArgs {
    std::filesystem::path image;
    std::filesystem::path out_dir = ".";
    RunConfig cfg;
};

/// Segments one eye image. Prints the boundary circles as JSON on `out` and
/// writes <stem>_overlay.png to out_dir: the source image with usable iris
/// pixels brightened and the pupil, iris and collarette circles plus any
/// eyelid lines drawn in white.
void run_segment(const SegmentArgs& a, std::ostream& out);

struct NormalizeArgs {
    std::filesystem::path image;
    std::filesystem::path out_dir = ".";
    RunConfig cfg;
};

/// Unwraps one eye image. Writes <stem>_norm.txt (radial_res x angular_res
/// rows of space-separated values) and <stem>_strip.txt (the eight mid rows)
/// to out_dir and prints both paths on `out`.
void run_normalize(const NormalizeArgs& a, std::ostream& out);

struct ExtractArgs {
    std::filesystem::path image;
    std::string method;
    std::string subject;  // empty = image stem
    std::string sample;   // empty = image stem
    RunConfig cfg;
};

/// Extracts one template and prints its store line on `out`.
void run_extract(const ExtractArgs& a, std::ostream& out);

struct EnrollArgs {
    std::filesystem::path db;
    std::string method;
    std::filesystem::path corpus;
    std::string layout = kDefaultLayout;
    RunConfig cfg;
};

/// Extracts a template for every image in the corpus and appends them to
/// the store in one write. Any image that fails the pipeline aborts the
/// command before anything is written.
void run_enroll(const EnrollArgs& a, std::ostream& out);

struct IdentifyArgs {
    std::filesystem::path db;
    std::string method;
    std::filesystem::path image;
    RunConfig cfg;
};

/// Matches one image against the enrolled templates of its method and
/// prints "subject<TAB>distance" for the nearest record. The probe is
/// re-coded at every column shift in [-shift_range, shift_range] and each
/// record scores its best shift, so an enrolled image matches its own
/// record at distance zero.
void run_identify(const IdentifyArgs& a, std::ostream& out);

struct EvaluateArgs {
    std::filesystem::path corpus;
    std::string layout = kDefaultLayout;
    std::vector<std::string> methods;  // empty = all
    std::filesystem::path out_dir = ".";
    RunConfig cfg;
};

/// Runs the recognition study on a corpus. Writes report.csv plus
/// intra_hist.csv and inter_hist.csv (pair-distance histograms of the
/// sign-code verifier) to out_dir, prints the report CSV on `out`, and
/// lists skipped images as warnings on `err`.
void run_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err);

struct GaSelectArgs {
    std::filesystem::path corpus;
    std::string layout = kDefaultLayout;
    std::filesystem::path out_dir = ".";
    RunConfig cfg;
};

/// Runs the genetic subset search over the 600 coarse sign bits of every
/// corpus image. Prints the best mask as 150 hex digits (bits packed
/// low-to-high per byte) plus a summary line on `out`, and writes the
/// per-generation history to out_dir/ga_history.csv.
void run_ga_select(const GaSelectArgs& a, std::ostream& out);

} // namespace irisct::cli

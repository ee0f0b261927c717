#include "irisct_cli/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <string_view>

#include "irisct/error.hpp"

namespace irisct::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T v{};
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        fail(ErrorCode::BadConfig, "bad value '" + value + "' for " + key);
    return v;
}

double parse_double(const std::string& key, const std::string& value) {
    // from_chars<double> is still missing on some libstdc++ targets; strtod
    // with a full-consume check covers the same ground.
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || value.empty())
        fail(ErrorCode::BadConfig, "bad value '" + value + "' for " + key);
    return v;
}

SvmParams::Kernel parse_kernel(const std::string& value) {
    if (value == "linear") return SvmParams::Kernel::Linear;
    if (value == "rbf") return SvmParams::Kernel::Rbf;
    fail(ErrorCode::BadConfig, "svm.kernel must be 'linear' or 'rbf', got '" + value + "'");
}

} // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto i = [&] { return parse_number<int>(key, value); };
    const auto d = [&] { return parse_double(key, value); };

    if (key == "radial_res") cfg.radial_res = i();
    else if (key == "angular_res") cfg.angular_res = i();
    else if (key == "segment.r_min") cfg.segment.r_min = d();
    else if (key == "segment.r_max") cfg.segment.r_max = d();
    else if (key == "segment.id_sigma") cfg.segment.id_sigma = d();
    else if (key == "segment.id_floor") cfg.segment.id_floor = d();
    else if (key == "segment.collarette_fraction") cfg.segment.collarette_fraction = d();
    else if (key == "segment.hough_vote_floor") cfg.segment.hough_vote_floor = d();
    else if (key == "segment.gabor_threshold") cfg.segment.gabor_threshold = d();
    else if (key == "segment.variance_threshold") cfg.segment.variance_threshold = d();
    else if (key == "segment.eyelash_window") cfg.segment.eyelash_window = i();
    else if (key == "ga.pop_size") cfg.ga.pop_size = i();
    else if (key == "ga.gene_len") cfg.ga.gene_len = i();
    else if (key == "ga.p_crossover") cfg.ga.p_crossover = d();
    else if (key == "ga.p_mutation") cfg.ga.p_mutation = d();
    else if (key == "ga.n_generations") cfg.ga.n_generations = i();
    else if (key == "ga.w_err") cfg.ga.w_err = d();
    else if (key == "ga.w_count") cfg.ga.w_count = d();
    else if (key == "svm.c") cfg.svm.c = d();
    else if (key == "svm.kernel") cfg.svm.kernel = parse_kernel(value);
    else if (key == "svm.gamma") cfg.svm.gamma = d();
    else if (key == "svm.tol") cfg.svm.tol = d();
    else if (key == "svm.max_iter") cfg.svm.max_iter = i();
    else if (key == "verify_threshold") cfg.verify_threshold = d();
    else if (key == "cascade_local_lo") cfg.cascade_local_lo = d();
    else if (key == "cascade_local_hi") cfg.cascade_local_hi = d();
    else if (key == "shift_range") cfg.shift_range = i();
    else if (key == "projection_dim") cfg.projection_dim = i();
    else if (key == "seed") cfg.seed = parse_number<uint64_t>(key, value);
    else fail(ErrorCode::BadConfig, "unknown config key '" + key + "'");
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::FileNotFound, "cannot open config " + path.string());

    RunConfig cfg;
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        if (const size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string_view body = trim(line);
        if (body.empty()) continue;
        const size_t eq = body.find('=');
        if (eq == std::string_view::npos)
            fail(ErrorCode::BadConfig,
                 path.string() + " line " + std::to_string(line_no) + ": expected key=value");
        try {
            set_config_value(cfg, std::string(trim(body.substr(0, eq))),
                             std::string(trim(body.substr(eq + 1))));
        } catch (const Error& e) {
            fail(e.code(),
                 path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

EvalOptions eval_options(const RunConfig& cfg) {
    EvalOptions opt;
    opt.seed = cfg.seed;
    opt.shift_range = cfg.shift_range;
    opt.verify_threshold = cfg.verify_threshold;
    opt.projection_dim = cfg.projection_dim;
    opt.radial_res = cfg.radial_res;
    opt.angular_res = cfg.angular_res;
    opt.segment = cfg.segment;
    opt.ga = cfg.ga;
    opt.svm = cfg.svm;
    return opt;
}

} // namespace irisct::cli

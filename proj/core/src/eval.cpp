#include "irisct/eval.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <limits>
#include <map>

#include "irisct/error.hpp"
#include "irisct/image.hpp"
#include "irisct/normalize.hpp"

namespace irisct {

namespace {

struct EvalImage {
    int subject = 0;  // dense index over the subjects present
    bool train = false;
    Strip strip;
};

bool is_real_method(FeatureMethod m) {
    switch (m) {
        case FeatureMethod::Glcm21:
        case FeatureMethod::Glcm56:
        case FeatureMethod::Global:
        case FeatureMethod::Aad:
        case FeatureMethod::Pca:
        case FeatureMethod::Ica:
            return true;
        default:
            return false;
    }
}

double masked_hamming(const std::vector<int8_t>& a, const std::vector<int8_t>& b,
                      std::span<const uint8_t> mask_a, std::span<const uint8_t> mask_b) {
    try {
        return hamming(a, b, mask_a, mask_b);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::EmptyMask) return 1.0;  // nothing jointly valid
        throw;
    }
}

double code_distance(FeatureMethod m, const FeatureVector& probe, const FeatureVector& gallery,
                     std::span<const uint8_t> selection) {
    switch (m) {
        case FeatureMethod::Binary:
            return masked_hamming(probe.codes, gallery.codes, probe.mask, gallery.mask);
        case FeatureMethod::Ga600:
            return masked_hamming(probe.codes, gallery.codes, selection, selection);
        case FeatureMethod::Local:
        case FeatureMethod::Combined:
            return trit_distance(probe.codes, gallery.codes);
        default:
            fail(ErrorCode::BadConfig, "not a code-matched method");
    }
}

const char* matcher_name(FeatureMethod m) {
    switch (m) {
        case FeatureMethod::Binary: return "nn-hd";
        case FeatureMethod::Ga600: return "nn-hd-masked";
        case FeatureMethod::Local:
        case FeatureMethod::Combined: return "nn-trit";
        case FeatureMethod::Nlac: return "nn-sparse";
        default: return "svm-linear";
    }
}

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

void append_number(std::string& out, const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    out += buf;
}

} // namespace

std::span<const FeatureMethod> all_methods() {
    static constexpr std::array<FeatureMethod, 11> order = {
        FeatureMethod::Glcm21, FeatureMethod::Glcm56, FeatureMethod::Local,
        FeatureMethod::Global, FeatureMethod::Combined, FeatureMethod::Binary,
        FeatureMethod::Nlac, FeatureMethod::Ga600, FeatureMethod::Aad,
        FeatureMethod::Pca, FeatureMethod::Ica,
    };
    return order;
}

FeatureVector extract_feature(FeatureMethod m, const Strip& strip) {
    switch (m) {
        case FeatureMethod::Glcm21: return feat_glcm21(strip);
        case FeatureMethod::Glcm56: return feat_glcm56(strip);
        case FeatureMethod::Local: return feat_local(strip);
        case FeatureMethod::Global: return feat_global(strip);
        case FeatureMethod::Combined: return feat_combined(strip);
        case FeatureMethod::Binary: return feat_binary(strip);
        case FeatureMethod::Nlac: return feat_nlac(strip);
        case FeatureMethod::Aad: return feat_aad(strip);
        case FeatureMethod::Ga600: {
            const std::vector<double> src = ga_feature_source(strip);
            FeatureVector f;
            f.method = FeatureMethod::Ga600;
            f.codes.reserve(src.size());
            for (double v : src) f.codes.push_back(int8_t(v > 0.5));
            return f;
        }
        case FeatureMethod::Pca:
        case FeatureMethod::Ica:
            fail(ErrorCode::BadConfig, "projection methods need a fitted basis");
    }
    fail(ErrorCode::BadConfig, "unknown method");
}

EvalReport evaluate(const DatasetIndex& idx, const EvalOptions& opt) {
    if (opt.shift_range < 0 || opt.shift_range >= opt.angular_res)
        fail(ErrorCode::BadConfig, "shift range must be a small nonnegative column count");
    if (!(opt.verify_threshold >= 0.0 && opt.verify_threshold <= 1.0))
        fail(ErrorCode::BadConfig, "verification threshold must lie in [0, 1]");
    if (opt.projection_dim < 1)
        fail(ErrorCode::BadConfig, "projection dimension must be positive");
    if (opt.radial_res < kStripFirstRow + kStripRows || opt.angular_res < 1)
        fail(ErrorCode::BadConfig, "unwrap resolution too small for the mid strip");

    std::vector<FeatureMethod> methods(opt.methods);
    if (methods.empty()) methods.assign(all_methods().begin(), all_methods().end());

    EvalReport rep;

    std::map<std::string, int> subject_of;
    for (const DatasetEntry& e : idx.entries) subject_of.emplace(e.subject_id, 0);
    int next = 0;
    for (auto& [id, dense] : subject_of) dense = next++;

    std::vector<EvalImage> images;
    for (const DatasetEntry& e : idx.entries) {
        try {
            const GrayImage img = io::load_image(e.path);
            const Segmentation seg = segment_eye(img, opt.segment);
            EvalImage im;
            im.subject = subject_of.at(e.subject_id);
            im.train = e.session == 1;
            im.strip = mid_strip(rubber_sheet(img, seg, opt.radial_res, opt.angular_res));
            images.push_back(std::move(im));
        } catch (const Error& err) {
            rep.failures.push_back(e.path.string() + ": " + err.what());
        }
    }
    rep.n_images = static_cast<int>(images.size());

    std::vector<int> gallery, probes;
    for (size_t i = 0; i < images.size(); ++i)
        (images[i].train ? gallery : probes).push_back(static_cast<int>(i));
    if (gallery.empty() || probes.empty())
        fail(ErrorCode::DegenerateSplit, "need session 1 plus at least one later session");

    const int n_variants = 2 * opt.shift_range + 1;
    const auto shifted_strip = [&](int image, int k) {
        return rotate_columns(images[size_t(image)].strip, k - opt.shift_range);
    };

    for (FeatureMethod m : methods) {
        EvalRow row;
        row.kind = "id";
        row.method = m;
        row.matcher = matcher_name(m);
        row.n_ref = static_cast<int>(gallery.size());
        row.n_probe = static_cast<int>(probes.size());

        std::vector<FeatureVector> feats(images.size());

        if (is_real_method(m)) {
            ProjectionBasis basis;
            const bool projected = m == FeatureMethod::Pca || m == FeatureMethod::Ica;
            if (projected) {
                std::vector<std::vector<double>> inputs;
                inputs.reserve(gallery.size());
                for (int g : gallery) inputs.push_back(projection_input(images[size_t(g)].strip));
                const int d = static_cast<int>(inputs[0].size());
                const int k = std::max(
                    1, std::min({opt.projection_dim, d, static_cast<int>(gallery.size()) - 1}));
                const auto kind = m == FeatureMethod::Pca ? ProjectionBasis::Kind::Pca
                                                          : ProjectionBasis::Kind::Ica;
                basis = fit_projection(inputs, kind, k, opt.seed);
            }

            const auto t0 = Clock::now();
            for (size_t i = 0; i < images.size(); ++i)
                feats[i] = projected ? feat_project(images[i].strip, basis)
                                     : extract_feature(m, images[i].strip);
            row.extract_ms = ms_between(t0, Clock::now()) / double(images.size());
            row.length = feats[0].length();

            MatD x(static_cast<int>(gallery.size()), static_cast<int>(row.length));
            std::vector<int> y;
            for (size_t g = 0; g < gallery.size(); ++g) {
                const FeatureVector& f = feats[size_t(gallery[g])];
                for (size_t c = 0; c < f.reals.size(); ++c) x(int(g), int(c)) = f.reals[c];
                y.push_back(images[size_t(gallery[g])].subject);
            }
            const SvmModel model = svm_train(x, y, opt.svm);
            for (int p : probes)
                row.n_correct += svm_predict(model, feats[size_t(p)].reals) ==
                                 images[size_t(p)].subject;
        } else {
            const auto t0 = Clock::now();
            for (size_t i = 0; i < images.size(); ++i)
                feats[i] = extract_feature(m, images[i].strip);
            row.extract_ms = ms_between(t0, Clock::now()) / double(images.size());
            row.length = feats[0].length();

            std::vector<uint8_t> selection;
            if (m == FeatureMethod::Ga600) {
                LabeledFeatures train;
                train.x = MatD(static_cast<int>(gallery.size()), kGeneLen);
                for (size_t g = 0; g < gallery.size(); ++g) {
                    const FeatureVector& f = feats[size_t(gallery[g])];
                    for (int c = 0; c < kGeneLen; ++c) train.x(int(g), c) = f.codes[size_t(c)];
                    train.labels.push_back(images[size_t(gallery[g])].subject);
                }
                GAParams ga = opt.ga;
                ga.rng_seed = opt.seed;
                selection = run_ga(train, ga).best.genes;
            }

            // Probe-side templates at every shift. Sparse gallery templates
            // are compared against the probe's full sign code.
            const bool sparse = m == FeatureMethod::Nlac;
            std::vector<std::vector<FeatureVector>> variants(images.size());
            for (int p : probes) {
                variants[size_t(p)].reserve(size_t(n_variants));
                for (int k = 0; k < n_variants; ++k)
                    variants[size_t(p)].push_back(
                        extract_feature(sparse ? FeatureMethod::Binary : m, shifted_strip(p, k)));
            }

            for (int p : probes) {
                double best = std::numeric_limits<double>::infinity();
                int best_subject = -1;
                for (int g : gallery)
                    for (const FeatureVector& v : variants[size_t(p)]) {
                        const double d =
                            sparse ? nlac_distance(feats[size_t(g)], v.codes)
                                   : code_distance(m, v, feats[size_t(g)], selection);
                        if (d < best) {
                            best = d;
                            best_subject = images[size_t(g)].subject;
                        }
                    }
                row.n_correct += best_subject == images[size_t(p)].subject;
            }

            if (m == FeatureMethod::Binary) {
                for (int g : gallery) {
                    variants[size_t(g)].reserve(size_t(n_variants));
                    for (int k = 0; k < n_variants; ++k)
                        variants[size_t(g)].push_back(extract_feature(m, shifted_strip(g, k)));
                }
                EvalRow verify;
                verify.kind = "verify";
                verify.method = m;
                verify.matcher = "hd-threshold";
                verify.length = row.length;
                verify.has_means = true;
                int correct_pairs = 0;
                for (size_t i = 0; i < images.size(); ++i)
                    for (size_t j = i + 1; j < images.size(); ++j) {
                        double d = std::numeric_limits<double>::infinity();
                        for (const FeatureVector& v : variants[i])
                            d = std::min(d, masked_hamming(v.codes, feats[j].codes, v.mask,
                                                           feats[j].mask));
                        const bool same = images[i].subject == images[j].subject;
                        (same ? rep.intra : rep.inter).push_back(d);
                        correct_pairs += (d <= opt.verify_threshold) == same;
                    }
                verify.n_ref = static_cast<int>(rep.intra.size());
                verify.n_probe = static_cast<int>(rep.inter.size());
                verify.n_correct = correct_pairs;
                const size_t total = rep.intra.size() + rep.inter.size();
                verify.accuracy = total ? double(correct_pairs) / double(total) : 0.0;
                const auto mean = [](const std::vector<double>& v) {
                    double s = 0;
                    for (double d : v) s += d;
                    return v.empty() ? 0.0 : s / double(v.size());
                };
                verify.intra_mean = mean(rep.intra);
                verify.inter_mean = mean(rep.inter);
                row.accuracy = row.n_probe ? double(row.n_correct) / row.n_probe : 0.0;
                rep.rows.push_back(row);
                rep.rows.push_back(std::move(verify));
                continue;
            }
        }

        row.accuracy = row.n_probe ? double(row.n_correct) / row.n_probe : 0.0;
        rep.rows.push_back(std::move(row));
    }

    return rep;
}

std::string report_csv(const EvalReport& report, bool include_timing) {
    std::string out = "kind,method,matcher,length,n_ref,n_probe,n_correct,accuracy,"
                      "intra_mean,inter_mean";
    if (include_timing) out += ",extract_ms";
    out += '\n';
    for (const EvalRow& r : report.rows) {
        out += r.kind;
        out += ',';
        out += to_string(r.method);
        out += ',';
        out += r.matcher;
        out += ',';
        out += std::to_string(r.length);
        out += ',';
        out += std::to_string(r.n_ref);
        out += ',';
        out += std::to_string(r.n_probe);
        out += ',';
        out += std::to_string(r.n_correct);
        out += ',';
        append_number(out, "%.6f", r.accuracy);
        out += ',';
        if (r.has_means) {
            append_number(out, "%.6f", r.intra_mean);
            out += ',';
            append_number(out, "%.6f", r.inter_mean);
        } else {
            out += ',';
        }
        if (include_timing) {
            out += ',';
            if (r.kind == "id") append_number(out, "%.3f", r.extract_ms);
        }
        out += '\n';
    }
    return out;
}

std::string histogram_csv(std::span<const double> values, int n_bins, double lo, double hi) {
    if (n_bins < 1 || !(hi > lo))
        fail(ErrorCode::BadConfig, "histogram needs at least one bin and lo < hi");
    std::vector<long> counts(size_t(n_bins), 0);
    for (double v : values) {
        int bin = static_cast<int>((v - lo) / (hi - lo) * n_bins);
        bin = std::clamp(bin, 0, n_bins - 1);
        ++counts[size_t(bin)];
    }
    std::string out = "bin_lo,bin_hi,count\n";
    for (int b = 0; b < n_bins; ++b) {
        append_number(out, "%.6f", lo + (hi - lo) * b / n_bins);
        out += ',';
        append_number(out, "%.6f", lo + (hi - lo) * (b + 1) / n_bins);
        out += ',';
        out += std::to_string(counts[size_t(b)]);
        out += '\n';
    }
    return out;
}

} // namespace irisct

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "irisct/segment.hpp"
#include "irisct/synth.hpp"

using namespace irisct;

namespace {

SynthEyeSpec basic_spec() {
    SynthEyeSpec s;
    s.iris = {160, 140, 90};
    s.pupil = {160, 140, 30};
    s.texture_seed = 7;
    return s;
}

double line_y(const EyelidLine& l, double x) { return (l.c - l.a * x) / l.b; }

Circle to_circle(const SynthCircle& c) { return {c.cx, c.cy, c.r}; }

int count_usable(const MatU8& mask) {
    int n = 0;
    for (uint8_t v : mask.v) n += v != 0;
    return n;
}

} // namespace

TEST_CASE("locate_pupil_iris recovers the generator circles") {
    GrayImage img = synth_eye(basic_spec(), 320, 280);
    auto [pupil, iris] = locate_pupil_iris(img, 15, 120);
    CHECK(pupil.r >= 29);
    CHECK(pupil.r <= 31);
    CHECK(iris.r >= 88);
    CHECK(iris.r <= 92);
    CHECK(std::hypot(pupil.cx - 160, pupil.cy - 140) <= 2.0);
    CHECK(std::hypot(iris.cx - 160, iris.cy - 140) <= 2.0);
}

TEST_CASE("locate_pupil_iris rejects a featureless image") {
    GrayImage img(320, 280, 128);
    CHECK_THROWS_WITH_AS(locate_pupil_iris(img, 15, 120), doctest::Contains("NoBoundaryFound"),
                         Error);
    GrayImage dark(320, 280, 40);
    CHECK_THROWS_AS(locate_pupil_iris(dark, 15, 120), Error);
}

TEST_CASE("locate_pupil_iris tracks a non-concentric pupil") {
    SynthEyeSpec s = basic_spec();
    s.pupil.cx = s.iris.cx + 5;
    GrayImage img = synth_eye(s, 320, 280);
    auto [pupil, iris] = locate_pupil_iris(img, 15, 120);
    double sep = std::hypot(pupil.cx - iris.cx, pupil.cy - iris.cy);
    CHECK(sep >= 3.0);
    CHECK(sep <= 7.0);
}

TEST_CASE("locate_pupil_iris holds plus-minus two pixels over random geometry") {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> pupil_r(20, 44);
    std::uniform_real_distribution<double> band(30, 76);
    std::uniform_real_distribution<double> jitter(-3, 3);
    int hits = 0;
    const int kTrials = 50;
    for (int t = 0; t < kTrials; ++t) {
        SynthEyeSpec s;
        s.texture_seed = 1000 + t;
        s.pupil.r = pupil_r(rng);
        s.iris.r = std::min(120.0, s.pupil.r + band(rng));
        s.iris.cx = 180 + jitter(rng);
        s.iris.cy = 150 + jitter(rng);
        s.pupil.cx = s.iris.cx + jitter(rng) * 0.8;
        s.pupil.cy = s.iris.cy + jitter(rng) * 0.8;
        GrayImage img = synth_eye(s, 360, 300);
        auto [pupil, iris] = locate_pupil_iris(img, 15, 124);
        bool ok = std::abs(pupil.r - s.pupil.r) <= 2.0 && std::abs(iris.r - s.iris.r) <= 2.0;
        if (!ok)
            MESSAGE("trial ", t, ": pupil ", pupil.r, " vs ", s.pupil.r, ", iris ", iris.r,
                    " vs ", s.iris.r);
        hits += ok;
    }
    CHECK(hits == kTrials);
}

TEST_CASE("detect_eyelids finds the drawn upper chord") {
    SynthEyeSpec s = basic_spec();
    s.eyelid_occlusion = 0.3;
    GrayImage img = synth_eye(s, 320, 280);
    SynthEyelids truth = synth_eyelid_lines(s);
    REQUIRE(truth.upper_y.has_value());

    auto lines = detect_eyelids(img, to_circle(s.pupil), to_circle(s.iris));
    REQUIRE(lines.size() == 1);
    for (double x : {s.iris.cx - 45.0, s.iris.cx, s.iris.cx + 45.0})
        CHECK(std::abs(line_y(lines[0], x) - *truth.upper_y) <= 3.0);
}

TEST_CASE("detect_eyelids returns nothing without occlusion") {
    GrayImage img = synth_eye(basic_spec(), 320, 280);
    SynthEyeSpec s = basic_spec();
    CHECK(detect_eyelids(img, to_circle(s.pupil), to_circle(s.iris)).empty());
}

TEST_CASE("heavy occlusion yields both lines and the clip covers the drawn skin") {
    SynthEyeSpec s = basic_spec();
    s.eyelid_occlusion = 0.8;
    GrayImage img = synth_eye(s, 320, 280);
    SynthEyelids truth = synth_eyelid_lines(s);
    REQUIRE(truth.upper_y.has_value());
    REQUIRE(truth.lower_y.has_value());

    auto lines = detect_eyelids(img, to_circle(s.pupil), to_circle(s.iris));
    REQUIRE(lines.size() == 2);

    Segmentation seg = segment_eye(img);
    int drawn = 0, leaked = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            bool skin = y < *truth.upper_y - 2 || y > *truth.lower_y + 2;
            if (!skin) continue;
            ++drawn;
            leaked += seg.noise_mask(y, x) != 0;
        }
    REQUIRE(drawn > 0);
    CHECK(leaked <= drawn / 50);
}

TEST_CASE("masked area never shrinks as occlusion grows") {
    int prev = INT32_MAX;
    for (double occ : {0.0, 0.2, 0.4, 0.6, 0.8}) {
        SynthEyeSpec s = basic_spec();
        s.eyelid_occlusion = occ;
        Segmentation seg = segment_eye(synth_eye(s, 320, 280));
        int usable = count_usable(seg.noise_mask);
        CHECK(usable <= prev);
        prev = usable;
    }
}

TEST_CASE("detect_eyelashes marks a thin dark streak") {
    GrayImage img(120, 80, 200);
    for (int y = 0; y < img.height; ++y) img.at(50, y) = 10;
    MatU8 mask = detect_eyelashes(img, 50, 20, 9);
    int covered = 0;
    for (int y = 0; y < img.height; ++y) covered += mask(y, 50) != 0;
    CHECK(covered >= static_cast<int>(0.9 * img.height));
}

TEST_CASE("detect_eyelashes leaves a constant image alone") {
    GrayImage img(100, 70, 128);
    MatU8 mask = detect_eyelashes(img, 50, 20, 9);
    CHECK(count_usable(mask) == 0);
}

TEST_CASE("detect_eyelashes flags a flat dark mat through the variance rule") {
    SynthEyeSpec s = basic_spec();
    GrayImage img = synth_eye(s, 320, 280);
    // Overwrite a patch of iris with a flat dark block, like matted lashes.
    for (int y = 80; y < 104; ++y)
        for (int x = 148; x < 172; ++x) img.at(x, y) = 35;
    MatU8 mask = detect_eyelashes(img, 20, 2.0, 9);
    int covered = 0;
    for (int y = 85; y < 99; ++y)
        for (int x = 153; x < 167; ++x) covered += mask(y, x) != 0;
    CHECK(covered >= 190);  // of 196 interior patch pixels
}

TEST_CASE("detect_eyelashes false-positive rate on a clean eye is under one percent") {
    SynthEyeSpec s = basic_spec();
    GrayImage img = synth_eye(s, 320, 280);
    MatU8 mask = detect_eyelashes(img, 50, 2.0, 9);
    int annulus = 0, masked = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double d = std::hypot(x - s.iris.cx, y - s.iris.cy);
            if (d <= s.pupil.r + 3 || d >= s.iris.r - 3) continue;
            ++annulus;
            masked += mask(y, x) != 0;
        }
    REQUIRE(annulus > 0);
    CHECK(masked < annulus / 100);
}

TEST_CASE("detect_eyelashes validates its parameters") {
    GrayImage img(20, 20, 100);
    CHECK_THROWS_AS(detect_eyelashes(img, 0, 20, 9), Error);
    CHECK_THROWS_AS(detect_eyelashes(img, 50, -1, 9), Error);
    CHECK_THROWS_AS(detect_eyelashes(img, 50, 20, 8), Error);
}

TEST_CASE("isolate_collarette interpolates the pupil-to-iris band") {
    Circle c1 = isolate_collarette({100, 100, 30}, {100, 100, 90}, 0.5);
    CHECK(c1.r == doctest::Approx(60));
    Circle c2 = isolate_collarette({100, 100, 30}, {100, 100, 90}, 1.0);
    CHECK(c2.r == doctest::Approx(90));
    Circle c3 = isolate_collarette({80, 90, 40}, {82, 92, 100}, 0.5);
    CHECK(c3.r == doctest::Approx(70));
    CHECK(c3.cx == doctest::Approx(80));
    CHECK(c3.cy == doctest::Approx(90));
}

TEST_CASE("collarette radius sits strictly inside the band") {
    Circle pupil{100, 100, 25};
    Circle iris{102, 99, 80};
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        Circle c = isolate_collarette(pupil, iris, f);
        CHECK(c.r > pupil.r);
        CHECK(c.r < iris.r);
    }
}

TEST_CASE("segment_eye produces a consistent segmentation") {
    SynthEyeSpec s = basic_spec();
    s.noise_level = 0.04;
    GrayImage img = synth_eye(s, 320, 280);
    Segmentation seg = segment_eye(img);

    CHECK(seg.pupil.r < seg.collarette.r);
    CHECK(seg.collarette.r <= seg.iris.r);
    CHECK(seg.noise_mask.rows == img.height);
    CHECK(seg.noise_mask.cols == img.width);
    CHECK(count_usable(seg.noise_mask) > 1000);

    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            if (!seg.noise_mask(y, x)) continue;
            double d = std::hypot(x - seg.pupil.cx, y - seg.pupil.cy);
            CHECK(d > seg.pupil.r);
            CHECK(d <= seg.collarette.r);
        }
}

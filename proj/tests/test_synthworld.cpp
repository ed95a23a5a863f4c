#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "acai/stats.hpp"
#include "acai/synthworld.hpp"

using namespace acai;
using namespace acai::world;
namespace fs = std::filesystem;

namespace {

SceneSpec basic_spec() {
    SceneSpec s;
    s.shape_class = 1;  // square
    s.size = 0.5;
    s.brightness = 1.0;
    s.x_pos = 0.5;
    s.y_pos = 0.5;
    s.hue = 0.6;
    s.background_level = 0.1;
    return s;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("synthworld") {

TEST_CASE("render_scene is deterministic for (spec, seed)") {
    const auto a = render_scene(basic_spec(), 32, 32, 1234, 0.02);
    const auto b = render_scene(basic_spec(), 32, 32, 1234, 0.02);
    REQUIRE(a.image.data.size() == b.image.data.size());
    CHECK(a.image.data == b.image.data);
    CHECK(a.mask == b.mask);

    const auto c = render_scene(basic_spec(), 32, 32, 999, 0.02);
    CHECK(a.image.data != c.image.data);  // the seed drives the noise field
}

TEST_CASE("illumination is an exact linear multiplier") {
    auto spec_half = basic_spec();
    spec_half.brightness = 0.5;
    const auto full = render_scene(basic_spec(), 32, 32, 7, 0.02);
    const auto half = render_scene(spec_half, 32, 32, 7, 0.02);
    for (size_t i = 0; i < full.image.data.size(); ++i)
        CHECK(half.image.data[i] == 0.5f * full.image.data[i]);
}

TEST_CASE("illumination linearity holds within 1 ulp for arbitrary pairs") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> bright(0.2, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        auto s1 = basic_spec();
        auto s2 = basic_spec();
        s1.brightness = bright(rng);
        s2.brightness = bright(rng);
        const auto r1 = render_scene(s1, 32, 32, 5, 0.02);
        const auto r2 = render_scene(s2, 32, 32, 5, 0.02);
        const double ratio = s1.brightness / s2.brightness;
        for (size_t i = 0; i < r1.image.data.size(); ++i) {
            const float got = r1.image.data[i];
            const float want = static_cast<float>(ratio * r2.image.data[i]);
            const float tol = std::max(std::abs(want), 1.0f) *
                              std::numeric_limits<float>::epsilon();
            CHECK(std::abs(got - want) <= tol);
        }
    }
}

TEST_CASE("square mask covers a quarter of the frame") {
    const auto ex = render_scene(basic_spec(), 64, 64, 0);
    // Reference rasterizer: count pixel centers inside the square.
    int ref = 0;
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            const double px = (x + 0.5) / 64.0, py = (y + 0.5) / 64.0;
            if (std::abs(px - 0.5) <= 0.25 && std::abs(py - 0.5) <= 0.25) ++ref;
        }
    const double ref_frac = ref / (64.0 * 64.0);
    const double area = extract_area(ex);
    CHECK(area == doctest::Approx(ref_frac).epsilon(0.02));
    CHECK(std::abs(area - 0.25) <= 0.05 * 0.25);
}

TEST_CASE("invalid specs are rejected with named violations") {
    auto s = basic_spec();
    s.brightness = 0.1;
    CHECK_THROWS_AS(render_scene(s, 32, 32, 0), ValidationError);
    s = basic_spec();
    s.size = 0.9;  // does not fit at x_pos 0.5 +- 0.45..
    s.x_pos = 0.5;
    s.y_pos = 0.9;
    CHECK_THROWS_AS(render_scene(s, 32, 32, 0), ValidationError);
    s = basic_spec();
    s.size = 0.05;  // under 4 pixels at 32 wide
    CHECK_THROWS_AS(render_scene(s, 32, 32, 0), ValidationError);
    CHECK_THROWS_AS(render_scene(basic_spec(), 8, 8, 0), ValidationError);
}

TEST_CASE("extract_brightness endpoints and gray reference") {
    RenderedExample ex;
    ex.image = Image(16, 16, 3);
    CHECK(extract_brightness(ex) == 0.0);

    std::fill(ex.image.data.begin(), ex.image.data.end(), 1.0f);
    CHECK(extract_brightness(ex) == 100.0);

    std::fill(ex.image.data.begin(), ex.image.data.end(), 0.5f);
    // Frozen from an independent sRGB->XYZ->L* reference computation.
    CHECK(extract_brightness(ex) == doctest::Approx(53.38896474111432).epsilon(1e-9));
}

TEST_CASE("extract_area edge cases") {
    RenderedExample ex;
    ex.image = Image(16, 16, 3);
    CHECK_THROWS_AS(extract_area(ex), UnsupportedInputError);

    ex.mask.assign(16 * 16, 0);
    CHECK(extract_area(ex) == 0.0);
    std::fill(ex.mask.begin(), ex.mask.end(), uint8_t{1});
    CHECK(extract_area(ex) == 1.0);
}

TEST_CASE("area grows with size and brightness extraction is strictly monotone") {
    for (int cls : {0, 1, 3}) {  // circle, square, ring
        double prev = -1.0;
        for (int i = 0; i < 20; ++i) {
            auto s = basic_spec();
            s.shape_class = cls;
            s.size = 0.30 + 0.35 * i / 19.0;
            const double a = extract_area(render_scene(s, 64, 64, 3));
            CHECK(a >= prev);
            prev = a;
        }
    }
    double prev = -1.0;
    for (int i = 0; i < 20; ++i) {
        auto s = basic_spec();
        s.brightness = 0.2 + 0.8 * i / 19.0;
        const double b = extract_brightness(render_scene(s, 32, 32, 3));
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("estimate_area tracks true size on rendered scenes") {
    std::vector<double> est, truth;
    for (int i = 0; i < 12; ++i) {
        auto s = basic_spec();
        s.size = 0.30 + 0.30 * i / 11.0;
        s.brightness = 0.4;
        const auto ex = render_scene(s, 32, 32, 3);
        est.push_back(estimate_area(ex.image));
        truth.push_back(extract_area(ex));
    }
    CHECK(stats::spearman(est, truth) > 0.9);
}

TEST_CASE("sample_dataset base distribution is unbiased at gamma 0") {
    WorldConfig world;
    world.image_size = 16;
    BiasConfig bias;
    bias.strength = 0.0;
    const auto split = sample_dataset(world, bias, 10000, 11, SplitRole::Train);

    std::vector<double> got;
    for (const auto& ex : split.examples) got.push_back(ex.scene->brightness);
    std::mt19937_64 rng(515);
    std::uniform_real_distribution<double> base(0.2, 1.0);
    std::vector<double> ref(10000);
    for (double& v : ref) v = base(rng);
    CHECK(stats::ks_two_sample(got, ref) < 0.05);
}

TEST_CASE("underrepresent bias raises the mean of the target factor") {
    WorldConfig world;
    world.image_size = 16;
    BiasConfig none;
    none.strength = 0.0;
    BiasConfig strong;
    strong.strength = 1.0;
    const auto unbiased = sample_dataset(world, none, 3000, 21, SplitRole::Train);
    const auto biased = sample_dataset(world, strong, 3000, 21, SplitRole::Train);

    auto mean_brightness = [](const DatasetSplit& s) {
        double acc = 0;
        for (const auto& ex : s.examples) acc += ex.scene->brightness;
        return acc / s.examples.size();
    };
    CHECK(mean_brightness(biased) > mean_brightness(unbiased));
}

TEST_CASE("label noise flips more labels at high factor values") {
    WorldConfig world;
    world.image_size = 16;
    BiasConfig bias;
    bias.mode = BiasMode::LabelNoise;
    bias.strength = 1.0;
    const auto split = sample_dataset(world, bias, 4000, 31, SplitRole::Train);

    int flips_hi = 0, n_hi = 0, flips_lo = 0, n_lo = 0;
    for (const auto& ex : split.examples) {
        const bool flipped = ex.label != ex.scene->shape_class;
        if (ex.scene->brightness > 0.6) {
            ++n_hi;
            flips_hi += flipped;
        } else {
            ++n_lo;
            flips_lo += flipped;
        }
    }
    CHECK(static_cast<double>(flips_hi) / n_hi > static_cast<double>(flips_lo) / n_lo);
    CHECK(flips_hi + flips_lo > 0);
}

TEST_CASE("sample_dataset determinism and per-index derivation") {
    WorldConfig world;
    world.image_size = 16;
    BiasConfig bias;
    bias.strength = 0.5;
    const auto a = sample_dataset(world, bias, 100, 77, SplitRole::Val);
    const auto b = sample_dataset(world, bias, 100, 77, SplitRole::Val);
    REQUIRE(a.examples.size() == b.examples.size());
    for (size_t i = 0; i < a.examples.size(); ++i)
        CHECK(a.examples[i].image.data == b.examples[i].image.data);

    // A longer draw extends, never reshuffles, the shorter one.
    const auto c = sample_dataset(world, bias, 150, 77, SplitRole::Val);
    for (size_t i = 0; i < a.examples.size(); ++i)
        CHECK(a.examples[i].image.data == c.examples[i].image.data);

    CHECK_THROWS_AS(sample_dataset(world, bias, 0, 1, SplitRole::Train), ValidationError);
}

TEST_CASE("bin_factor spec points") {
    CHECK(bin_factor(-2.0, -2.0, 2.0, 10) == 0);
    CHECK(bin_factor(2.0, -2.0, 2.0, 10) == 9);
    CHECK(bin_factor(0.0, -2.0, 2.0, 10) == 5);
    CHECK(bin_factor(-3.0, -2.0, 2.0, 10) == 0);
    CHECK(bin_factor(7.0, -2.0, 2.0, 10) == 9);
    CHECK_THROWS_AS(bin_factor(0.0, 2.0, -2.0, 10), ValidationError);
    CHECK_THROWS_AS(bin_factor(0.0, 0.0, 0.0, 10), ValidationError);
    CHECK_THROWS_AS(bin_factor(0.0, -2.0, 2.0, 0), ValidationError);
}

TEST_CASE("bin_factor agrees with a linear-scan oracle") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_int_distribution<int> nb(1, 50);
    for (int t = 0; t < 100000; ++t) {
        double lo = u(rng), hi = u(rng);
        if (lo == hi) continue;
        if (lo > hi) std::swap(lo, hi);
        const double value = u(rng);
        const int n_bins = nb(rng);

        int oracle = n_bins - 1;
        const double width = (hi - lo) / n_bins;
        for (int i = 0; i < n_bins; ++i) {
            if (value < lo + (i + 1) * width) {
                oracle = i;
                break;
            }
        }
        if (value < lo) oracle = 0;
        CHECK(bin_factor(value, lo, hi, n_bins) == oracle);
    }
}

TEST_CASE("manifest round trip preserves labels and factors") {
    const fs::path dir = fs::path("test_tmp") / "synthworld_roundtrip";
    fs::remove_all(dir);

    WorldConfig world;
    world.image_size = 16;
    BiasConfig bias;
    const auto split = sample_dataset(world, bias, 25, 5, SplitRole::Test);
    write_dataset(split, dir.string());
    const auto loaded = load_dataset(dir.string());

    REQUIRE(loaded.examples.size() == split.examples.size());
    CHECK(loaded.role == SplitRole::Test);
    CHECK(loaded.seed == split.seed);
    for (size_t i = 0; i < split.examples.size(); ++i) {
        const auto& a = split.examples[i];
        const auto& b = loaded.examples[i];
        CHECK(a.label == b.label);
        CHECK(!b.scene.has_value());
        CHECK(!b.has_mask());
        CHECK(b.computed_factors.at("brightness") ==
              doctest::Approx(a.computed_factors.at("brightness")).epsilon(1e-5));
        CHECK(b.computed_factors.at("area") ==
              doctest::Approx(a.computed_factors.at("area")).epsilon(1e-5));
        // 8-bit quantization is the only loss through the PNG round trip.
        for (size_t p = 0; p < a.image.data.size(); ++p)
            CHECK(std::abs(a.image.data[p] - b.image.data[p]) <= 0.5f / 255.0f + 1e-6f);
    }

    // Identical splits serialize to identical bytes.
    const fs::path dir2 = fs::path("test_tmp") / "synthworld_roundtrip2";
    fs::remove_all(dir2);
    write_dataset(split, dir2.string());
    CHECK(read_file(dir / "manifest.csv") == read_file(dir2 / "manifest.csv"));
    CHECK(read_file(dir / "images" / "000000.png") == read_file(dir2 / "images" / "000000.png"));
}

}  // TEST_SUITE

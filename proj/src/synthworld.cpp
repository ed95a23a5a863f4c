#include "acai/synthworld.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "acai/imageio.hpp"

namespace fs = std::filesystem;

namespace acai::world {

// ------------------------------------------------------------- validation ---

void SceneSpec::validate(int n_classes) const {
    if (shape_class < 0 || shape_class >= n_classes)
        throw ValidationError("SceneSpec.shape_class out of [0, n_classes)");
    if (!(size > 0.0 && size <= 1.0)) throw ValidationError("SceneSpec.size out of (0, 1]");
    if (!(brightness >= kBrightnessLo && brightness <= kBrightnessHi))
        throw ValidationError("SceneSpec.brightness out of [0.2, 1.0]");
    if (!(x_pos >= 0.0 && x_pos <= 1.0 && y_pos >= 0.0 && y_pos <= 1.0))
        throw ValidationError("SceneSpec position out of [0, 1]");
    if (x_pos < size / 2 - 1e-12 || x_pos > 1.0 - size / 2 + 1e-12 ||
        y_pos < size / 2 - 1e-12 || y_pos > 1.0 - size / 2 + 1e-12)
        throw ValidationError("SceneSpec object must lie fully inside the frame");
    if (!(hue >= 0.0 && hue < 1.0)) throw ValidationError("SceneSpec.hue out of [0, 1)");
    if (!(background_level >= 0.0 && background_level <= 0.3))
        throw ValidationError("SceneSpec.background_level out of [0, 0.3]");
}

void BiasConfig::validate() const {
    if (target_factor != "brightness" && target_factor != "size")
        throw ValidationError("BiasConfig.target_factor must be 'brightness' or 'size'");
    if (!(strength >= 0.0 && strength <= 1.0))
        throw ValidationError("BiasConfig.strength out of [0, 1]");
}

void WorldConfig::validate() const {
    if (image_size < 16) throw ValidationError("WorldConfig.image_size must be >= 16");
    if (n_classes < 1 || n_classes > kMaxClasses)
        throw ValidationError("WorldConfig.n_classes out of [1, 5]");
    if (!(noise >= 0.0)) throw ValidationError("WorldConfig.noise must be >= 0");
    if (!(size_lo > 0.0 && size_lo <= size_hi && size_hi <= 1.0))
        throw ValidationError("WorldConfig size range invalid");
}

void DatasetSplit::validate() const {
    if (examples.empty()) throw ValidationError("DatasetSplit must be non-empty");
    for (const auto& e : examples) {
        if (!e.image.same_shape(examples.front().image))
            throw ValidationError("DatasetSplit images must share one shape");
    }
}

std::vector<double> DatasetSplit::label_distribution(int n_classes) const {
    std::vector<double> dist(static_cast<size_t>(n_classes), 0.0);
    for (const auto& e : examples) {
        if (e.label < 0 || e.label >= n_classes)
            throw ValidationError("label out of range for label_distribution");
        dist[static_cast<size_t>(e.label)] += 1.0;
    }
    for (double& d : dist) d /= static_cast<double>(examples.size());
    return dist;
}

std::string to_string(SplitRole role) {
    switch (role) {
        case SplitRole::Train: return "train";
        case SplitRole::Val: return "val";
        case SplitRole::Test: return "test";
    }
    return "train";
}

SplitRole split_role_from_string(const std::string& s) {
    if (s == "train") return SplitRole::Train;
    if (s == "val") return SplitRole::Val;
    if (s == "test") return SplitRole::Test;
    throw ValidationError("unknown split role: " + s);
}

// --------------------------------------------------------------- renderer ---

namespace {

struct Rgb {
    double r, g, b;
};

Rgb hsv_to_rgb(double h, double s, double v) {
    h = h - std::floor(h);
    const double hh = h * 6.0;
    const int sector = static_cast<int>(hh) % 6;
    const double f = hh - std::floor(hh);
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (sector) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, t};
    }
}

// Point-inside test in unit-square scene coordinates.
bool inside_shape(Shape shape, double dx, double dy, double r) {
    switch (shape) {
        case Shape::Circle:
            return dx * dx + dy * dy <= r * r;
        case Shape::Square:
            return std::abs(dx) <= r && std::abs(dy) <= r;
        case Shape::Triangle: {
            // Upward triangle with apex at (0,-r), base at y=+r.
            if (dy < -r || dy > r) return false;
            const double half_width = r * (dy + r) / (2.0 * r);
            return std::abs(dx) <= half_width;
        }
        case Shape::Ring: {
            const double d2 = dx * dx + dy * dy;
            const double rin = 0.55 * r;
            return d2 <= r * r && d2 >= rin * rin;
        }
        case Shape::Cross: {
            const double arm = 0.34 * r;
            return (std::abs(dx) <= arm && std::abs(dy) <= r) ||
                   (std::abs(dy) <= arm && std::abs(dx) <= r);
        }
    }
    return false;
}

constexpr int kSubsamples = 3;  // 3x3 supersampling per pixel

}  // namespace

RenderedExample render_scene(const SceneSpec& spec, int height, int width, uint64_t seed,
                             double noise, int n_classes) {
    spec.validate(n_classes);
    if (height < 16 || width < 16) throw ValidationError("render_scene: height/width must be >= 16");
    if (spec.size * width < 4.0)
        throw ValidationError("render_scene: size * image_width must be >= 4 pixels");

    const auto shape = static_cast<Shape>(spec.shape_class);
    const Rgb obj = hsv_to_rgb(spec.hue, 0.8, 1.0);
    const double bg = spec.background_level;
    const double r = spec.size / 2.0;

    RenderedExample out;
    out.image = Image(height, width, 3);
    out.label = spec.shape_class;
    out.scene = spec;
    out.mask.assign(static_cast<size_t>(height) * width, 0);

    std::mt19937_64 rng(derive_seed(seed, "render_noise"));
    std::uniform_real_distribution<double> noise_dist(-noise, noise);

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            // Supersampled coverage in scene coordinates.
            int hits = 0;
            for (int sy = 0; sy < kSubsamples; ++sy) {
                for (int sx = 0; sx < kSubsamples; ++sx) {
                    const double px = (x + (sx + 0.5) / kSubsamples) / width;
                    const double py = (y + (sy + 0.5) / kSubsamples) / height;
                    if (inside_shape(shape, px - spec.x_pos, py - spec.y_pos, r)) ++hits;
                }
            }
            const double cov = static_cast<double>(hits) / (kSubsamples * kSubsamples);
            out.mask[static_cast<size_t>(y) * width + x] = cov >= 0.5 ? 1 : 0;

            const double unlit[3] = {bg * (1.0 - cov) + obj.r * cov,
                                     bg * (1.0 - cov) + obj.g * cov,
                                     bg * (1.0 - cov) + obj.b * cov};
            for (int c = 0; c < 3; ++c) {
                double v = unlit[c];
                if (noise > 0.0) v += noise_dist(rng);
                const double u = std::clamp(v, 0.0, 1.0);
                // Illumination is the final linear multiplier on the unlit render.
                out.image.at(c, y, x) = static_cast<float>(spec.brightness * u);
            }
        }
    }

    out.computed_factors["brightness"] = extract_brightness(out.image);
    out.computed_factors["area"] = extract_area(out);
    return out;
}

// -------------------------------------------------------------- extractors ---

namespace {

double srgb_to_linear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double lstar_of_Y(double t) {
    constexpr double delta = 6.0 / 29.0;
    if (t > delta * delta * delta) return 116.0 * std::cbrt(t) - 16.0;
    return 116.0 * t / (3.0 * delta * delta);
}

}  // namespace

double extract_brightness(const Image& image) {
    if (image.data.empty() || image.channels != 3)
        throw ValidationError("extract_brightness: need a non-empty RGB image");
    double acc = 0.0;
    const size_t npix = static_cast<size_t>(image.height) * image.width;
    for (size_t p = 0; p < npix; ++p) {
        const double rl = srgb_to_linear(image.data[p]);
        const double gl = srgb_to_linear(image.data[npix + p]);
        const double bl = srgb_to_linear(image.data[2 * npix + p]);
        const double Y = 0.2126 * rl + 0.7152 * gl + 0.0722 * bl;
        acc += lstar_of_Y(Y);
    }
    return acc / static_cast<double>(npix);
}

double extract_brightness(const RenderedExample& example) {
    return extract_brightness(example.image);
}

double extract_area(const RenderedExample& example) {
    if (!example.has_mask())
        throw UnsupportedInputError("extract_area: example carries no object mask");
    size_t covered = 0;
    for (uint8_t m : example.mask) covered += m ? 1 : 0;
    return static_cast<double>(covered) / static_cast<double>(example.mask.size());
}

double estimate_area(const Image& image) {
    if (image.data.empty() || image.channels != 3)
        throw ValidationError("estimate_area: need a non-empty RGB image");
    const int h = image.height, w = image.width;
    const size_t npix = static_cast<size_t>(h) * w;

    // Background estimate from the one-pixel border; scale from the image max.
    double bg[3] = {0, 0, 0};
    int nb = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (y != 0 && y != h - 1 && x != 0 && x != w - 1) continue;
            for (int c = 0; c < 3; ++c) bg[c] += image.at(c, y, x);
            ++nb;
        }
    }
    for (double& v : bg) v /= nb;
    float peak = 1e-6f;
    for (float v : image.data) peak = std::max(peak, v);

    size_t covered = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double d = 0.0;
            for (int c = 0; c < 3; ++c) d += std::abs(image.at(c, y, x) - bg[c]);
            if (d > 0.25 * peak) ++covered;
        }
    }
    return static_cast<double>(covered) / static_cast<double>(npix);
}

// ---------------------------------------------------------------- sampler ---

namespace {

double factor_norm(const SceneSpec& spec, const WorldConfig& world, const std::string& factor) {
    if (factor == "brightness")
        return (spec.brightness - kBrightnessLo) / (kBrightnessHi - kBrightnessLo);
    return (spec.size - world.size_lo) / std::max(1e-12, world.size_hi - world.size_lo);
}

SceneSpec draw_scene(std::mt19937_64& rng, const WorldConfig& world) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SceneSpec s;
    s.shape_class = static_cast<int>(unit(rng) * world.n_classes);
    s.shape_class = std::min(s.shape_class, world.n_classes - 1);
    s.size = world.fixed_size ? *world.fixed_size
                              : world.size_lo + unit(rng) * (world.size_hi - world.size_lo);
    s.brightness = kBrightnessLo + unit(rng) * (kBrightnessHi - kBrightnessLo);
    const double lo = s.size / 2.0, hi = 1.0 - s.size / 2.0;
    s.x_pos = world.fixed_x ? *world.fixed_x : lo + unit(rng) * (hi - lo);
    s.y_pos = world.fixed_y ? *world.fixed_y : lo + unit(rng) * (hi - lo);
    s.hue = world.fixed_hue ? *world.fixed_hue : unit(rng);
    s.background_level = world.fixed_background ? *world.fixed_background : unit(rng) * 0.3;
    return s;
}

}  // namespace

DatasetSplit sample_dataset(const WorldConfig& world, const BiasConfig& bias, int n,
                            uint64_t seed, SplitRole role) {
    world.validate();
    bias.validate();
    if (n < 1) throw ValidationError("sample_dataset: n must be >= 1");

    DatasetSplit split;
    split.role = role;
    split.seed = seed;
    split.examples.reserve(static_cast<size_t>(n));

    constexpr int kMaxAttempts = 100000;
    for (int i = 0; i < n; ++i) {
        // Per-index substream: results do not depend on evaluation order.
        std::mt19937_64 rng(derive_seed(seed, static_cast<uint64_t>(i)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        SceneSpec spec;
        bool accepted = false;
        for (int attempt = 0; attempt < kMaxAttempts && !accepted; ++attempt) {
            spec = draw_scene(rng, world);
            if (bias.mode == BiasMode::Underrepresent && bias.strength > 0.0) {
                const double f = factor_norm(spec, world, bias.target_factor);
                const double keep = std::exp(-bias.strength * kUnderrepresentTau * (1.0 - f));
                accepted = unit(rng) < keep;
            } else {
                accepted = true;
            }
        }
        if (!accepted) throw ValidationError("sample_dataset: rejection sampling failed to accept");

        auto ex = render_scene(spec, world.image_size, world.image_size,
                               derive_seed(seed, static_cast<uint64_t>(i) * 2 + 1), world.noise,
                               world.n_classes);

        if (bias.mode == BiasMode::LabelNoise && bias.strength > 0.0 && world.n_classes > 1) {
            const double f = factor_norm(spec, world, bias.target_factor);
            if (unit(rng) < bias.strength * f) {
                int flip = static_cast<int>(unit(rng) * (world.n_classes - 1));
                flip = std::min(flip, world.n_classes - 2);
                ex.label = flip >= ex.label ? flip + 1 : flip;
            }
        }
        split.examples.push_back(std::move(ex));
    }
    return split;
}

int bin_factor(double value, double lo, double hi, int n_bins) {
    if (!(lo < hi)) throw ValidationError("bin_factor: lo must be < hi");
    if (n_bins < 1) throw ValidationError("bin_factor: n_bins must be >= 1");
    if (value < lo) return 0;
    if (value >= hi) return n_bins - 1;
    const double width = (hi - lo) / n_bins;
    int b = static_cast<int>(std::floor((value - lo) / width));
    return std::clamp(b, 0, n_bins - 1);
}

// ---------------------------------------------------------------- manifest ---

namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

}  // namespace

void write_dataset(const DatasetSplit& split, const std::string& dir) {
    split.validate();
    fs::create_directories(fs::path(dir) / "images");

    std::ofstream csv(fs::path(dir) / "manifest.csv", std::ios::trunc);
    if (!csv) throw IoError("write_dataset: cannot write manifest in " + dir);
    csv << "path,label,size,brightness,x_pos,y_pos,hue,computed_brightness,computed_area,"
           "split_role,seed\n";

    char name[64];
    for (size_t i = 0; i < split.examples.size(); ++i) {
        const auto& ex = split.examples[i];
        std::snprintf(name, sizeof(name), "images/%06zu.png", i);
        io::write_png((fs::path(dir) / name).string(), ex.image);

        const SceneSpec scene = ex.scene.value_or(SceneSpec{});
        const double cb = ex.computed_factors.count("brightness")
                              ? ex.computed_factors.at("brightness")
                              : extract_brightness(ex.image);
        const double ca = ex.computed_factors.count("area") ? ex.computed_factors.at("area") : 0.0;
        csv << name << ',' << ex.label << ',' << fmt6(scene.size) << ',' << fmt6(scene.brightness)
            << ',' << fmt6(scene.x_pos) << ',' << fmt6(scene.y_pos) << ',' << fmt6(scene.hue)
            << ',' << fmt6(cb) << ',' << fmt6(ca) << ',' << to_string(split.role) << ','
            << split.seed << '\n';
    }
}

DatasetSplit load_dataset(const std::string& dir) {
    std::ifstream csv(fs::path(dir) / "manifest.csv");
    if (!csv) throw IoError("load_dataset: no manifest.csv in " + dir);

    std::string header;
    std::getline(csv, header);
    const std::string expected =
        "path,label,size,brightness,x_pos,y_pos,hue,computed_brightness,computed_area,"
        "split_role,seed";
    if (header != expected) throw IoError("load_dataset: unexpected manifest header in " + dir);

    DatasetSplit split;
    split.manifest_path = (fs::path(dir) / "manifest.csv").string();
    std::string line;
    bool first = true;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 11) throw IoError("load_dataset: malformed manifest row");
        RenderedExample ex;
        ex.path = f[0];
        ex.image = io::read_png((fs::path(dir) / f[0]).string());
        ex.label = std::stoi(f[1]);
        ex.computed_factors["brightness"] = std::stod(f[7]);
        ex.computed_factors["area"] = std::stod(f[8]);
        if (first) {
            split.role = split_role_from_string(f[9]);
            split.seed = std::stoull(f[10]);
            first = false;
        }
        split.examples.push_back(std::move(ex));
    }
    split.validate();
    return split;
}

}  // namespace acai::world

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acai/common.hpp"

namespace acai::world {

// Shape classes rendered by the world, in label order.
enum class Shape : int { Circle = 0, Square = 1, Triangle = 2, Ring = 3, Cross = 4 };
inline constexpr int kMaxClasses = 5;

inline constexpr double kBrightnessLo = 0.2;
inline constexpr double kBrightnessHi = 1.0;

// Full ground-truth description of one scene.
struct SceneSpec {
    int shape_class = 0;          // task label, in [0, n_classes)
    double size = 0.5;            // object width as a fraction of image width, (0, 1]
    double brightness = 1.0;      // global illumination multiplier, [0.2, 1.0]
    double x_pos = 0.5;           // object center, [0, 1]
    double y_pos = 0.5;
    double hue = 0.0;             // color angle, [0, 1)
    double background_level = 0.1;  // gray backdrop, [0, 0.3]

    // Throws ValidationError naming the violated invariant.
    void validate(int n_classes = kMaxClasses) const;
};

struct RenderedExample {
    Image image;
    int label = 0;
    std::optional<SceneSpec> scene;              // present for in-memory synthetic data
    std::map<std::string, double> computed_factors;  // "brightness", "area"
    std::vector<uint8_t> mask;                   // per-pixel object mask; empty if unknown
    std::string path;                            // set when loaded from a manifest

    bool has_mask() const { return !mask.empty(); }
};

enum class BiasMode { Underrepresent, LabelNoise };

struct BiasConfig {
    std::string target_factor = "brightness";  // "brightness" or "size"
    BiasMode mode = BiasMode::Underrepresent;
    double strength = 0.0;  // gamma in [0, 1]

    void validate() const;
};

enum class SplitRole { Train, Val, Test };
std::string to_string(SplitRole role);
SplitRole split_role_from_string(const std::string& s);

struct DatasetSplit {
    std::vector<RenderedExample> examples;
    SplitRole role = SplitRole::Train;
    uint64_t seed = 0;
    std::optional<std::string> manifest_path;

    void validate() const;  // non-empty, uniform image shape
    std::vector<double> label_distribution(int n_classes) const;
};

// World-level knobs shared by every example of a dataset. Scene parameters are
// drawn as: class uniform over n_classes, size ~ U[size range], brightness ~
// U[0.2, 1.0], x/y ~ U[size/2, 1-size/2], hue ~ U[0,1), background ~ U[0,0.3].
struct WorldConfig {
    int image_size = 32;  // square images, >= 16
    int n_classes = 4;    // 3..5
    double noise = 0.0;   // amplitude of per-pixel uniform noise in the unlit render
    double size_lo = 0.30;
    double size_hi = 0.65;
    // Fixed-factor overrides for reduced worlds (e.g. the 1-factor brightness
    // world): when set, the sampler pins that parameter instead of drawing it.
    std::optional<double> fixed_size;
    std::optional<double> fixed_x;
    std::optional<double> fixed_y;
    std::optional<double> fixed_hue;
    std::optional<double> fixed_background;

    void validate() const;
};

// ------------------------------------------------------------- operations ---

// Deterministic render. `noise` is the unlit-render noise amplitude; the
// illumination multiplier is applied last, so render(b) == (b/b') *
// render(b') pixel-wise.
RenderedExample render_scene(const SceneSpec& spec, int height, int width, uint64_t seed,
                             double noise = 0.0, int n_classes = kMaxClasses);

// Mean CIELab L* over all pixels (sRGB transfer, D65 white). Range [0, 100].
double extract_brightness(const RenderedExample& example);
double extract_brightness(const Image& image);

// Fraction of pixels covered by the object mask. Requires synthetic-world
// provenance (a recorded mask).
double extract_area(const RenderedExample& example);

// Mask-free area proxy usable on generated images: fraction of pixels whose
// color deviates from the border-estimated background, relative to the
// image's own intensity scale.
double estimate_area(const Image& image);

// Draws n examples from the world's base distributions, applying the bias
// config. Deterministic given seed; each index uses an independent derived
// substream so results are order-independent.
//
// Bias semantics (gamma = strength, f_norm = normalized target factor in
// [0,1]): Underrepresent keeps an example with probability
// exp(-gamma * tau * (1 - f_norm)) with tau = 3, thinning the low end of the
// factor so the split over-represents high values. LabelNoise keeps every
// example and flips its label to a uniformly random other class with
// probability gamma * f_norm.
DatasetSplit sample_dataset(const WorldConfig& world, const BiasConfig& bias, int n,
                            uint64_t seed, SplitRole role);

inline constexpr double kUnderrepresentTau = 3.0;

// Equal-width binning with clamp-to-edge for out-of-range values.
int bin_factor(double value, double lo, double hi, int n_bins);

// --------------------------------------------------------------- manifest ---

// Dataset directory layout: images/NNNNNN.png plus manifest.csv with the
// fixed column order (path, label, size, brightness, x_pos, y_pos, hue,
// computed_brightness, computed_area, split_role, seed); reals use 6 decimal
// digits.
void write_dataset(const DatasetSplit& split, const std::string& dir);
DatasetSplit load_dataset(const std::string& dir);

}  // namespace acai::world

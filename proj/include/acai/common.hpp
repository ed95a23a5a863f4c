#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace acai {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------- errors ---

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error("validation: " + msg) {}
};

struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& msg) : std::runtime_error("divergence: " + msg) {}
};

struct UnsupportedInputError : std::runtime_error {
    explicit UnsupportedInputError(const std::string& msg)
        : std::runtime_error("unsupported input: " + msg) {}
};

struct ConflictError : std::runtime_error {
    explicit ConflictError(const std::string& msg) : std::runtime_error("conflict: " + msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("io: " + msg) {}
};

// ------------------------------------------------------------------ image ---

// Channel-major pixel storage: data[c*H*W + y*W + x], values expected in [0,1].
struct Image {
    int height = 0;
    int width = 0;
    int channels = 3;
    std::vector<float> data;

    Image() = default;
    Image(int h, int w, int c = 3) : height(h), width(w), channels(c) {
        data.assign(static_cast<size_t>(h) * w * c, 0.0f);
    }

    float& at(int c, int y, int x) {
        return data[(static_cast<size_t>(c) * height + y) * width + x];
    }
    float at(int c, int y, int x) const {
        return data[(static_cast<size_t>(c) * height + y) * width + x];
    }
    size_t size() const { return data.size(); }

    bool all_finite() const {
        for (float v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
    bool same_shape(const Image& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

inline float clamp01(float v) { return v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v); }

// -------------------------------------------------------------------- rng ---

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Named substream derivation: independent streams for data shuffling, latent
// sampling, parameter init, etc. so that disabling one consumer never shifts
// the draws seen by another.
inline uint64_t derive_seed(uint64_t base, std::string_view tag) {
    return splitmix64(base ^ fnv1a64(tag));
}

inline uint64_t derive_seed(uint64_t base, uint64_t index) {
    return splitmix64(splitmix64(base) ^ splitmix64(index * 0x9e3779b97f4a7c15ULL + 1));
}

}  // namespace acai

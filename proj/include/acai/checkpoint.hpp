#pragma once

// Versioned binary checkpoint container: a JSON header (kind, architecture
// descriptor, training step, seed, config hash) followed by named float32
// parameter arrays. Loading with a mismatched architecture descriptor is an
// error.

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

#include "acai/nn.hpp"

namespace acai::ckpt {

inline constexpr uint32_t kVersion = 1;

struct Snapshot {
    nlohmann::json header;
    std::map<std::string, nn::Mat<float>> arrays;
};

void save(const std::string& path, const std::string& kind, const nlohmann::json& arch,
          const nlohmann::json& meta, const std::vector<nn::ParamRef<float>>& params);

Snapshot load(const std::string& path);

// Validates kind and, when expected_arch is non-null, the architecture
// descriptor; throws ConflictError on mismatch.
void check_kind_arch(const Snapshot& snap, const std::string& kind,
                     const nlohmann::json* expected_arch);

// Copies arrays into the referenced parameters by name; shape mismatches or
// missing arrays throw ConflictError.
void restore(const Snapshot& snap, const std::vector<nn::ParamRef<float>>& params);

}  // namespace acai::ckpt

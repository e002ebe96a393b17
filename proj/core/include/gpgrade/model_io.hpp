#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "gpgrade/gp.hpp"

namespace gpgrade {

inline constexpr char kModelMagic[8] = {'G', 'P', 'G', 'R', 'A', 'D', 'E', '\0'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(const void* data, std::size_t size);

/// Encodes a model in the archive layout documented in docs/model_format.md.
std::string serialize_model(const GPModel& model);

/// Decodes an archive, refactorizes the training covariance and checks the
/// recomputed factor and weights against the stored fingerprints.
GPModel deserialize_model(const std::string& bytes);

void save_model(const GPModel& model, const std::filesystem::path& path);
GPModel load_model(const std::filesystem::path& path);

}  // namespace gpgrade

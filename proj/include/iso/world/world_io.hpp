#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "iso/world/world_gen.hpp"

namespace iso {

/// Format tag and version written into every world file.
inline constexpr const char* kWorldFormat = "iso-world";
inline constexpr int kWorldFormatVersion = 1;

nlohmann::json to_json(const WorldConfig& config);
WorldConfig world_config_from_json(const nlohmann::json& j);

/// Connectivity lists, sparse transition rows aligned with them, and D0.
nlohmann::json to_json(const TabularSystem& system);
TabularSystem system_from_json(const nlohmann::json& j);

nlohmann::json to_json(const World& world);
World world_from_json(const nlohmann::json& j);

void save_world(const World& world, const std::filesystem::path& path);
World load_world(const std::filesystem::path& path);

}  // namespace iso

#pragma once

#include <json.hpp>

#include "lanewrap/types.hpp"

namespace lanewrap::detail {

nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lanewrap::detail

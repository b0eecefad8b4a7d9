#pragma once

#include "tcsde/config.hpp"

#include <json.hpp>

#include <exception>
#include <string>
#include <vector>

namespace tcsde {

struct OutputBundle {
    std::vector<std::string> csv_paths;
    std::string json_summary_path;
    std::vector<std::string> svg_paths;
    /// Config echo (without output_dir), code version and master seed.
    nlohmann::json manifest;
    /// Lines meant for the terminal.
    std::vector<std::string> messages;
};

nlohmann::json manifest_of(const RunConfig& config);

/// Computes the command, then writes CSV, JSON (and SVG) files into
/// config.output_dir, plus manifest.ini for reruns.
OutputBundle run(const RunConfig& config);

/// Machine-readable error document: type, module, message and key path.
nlohmann::json error_json(const std::exception& e);

}  // namespace tcsde

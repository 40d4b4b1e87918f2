#pragma once

#include "floodrisk/unsteady_flow.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace floodrisk {

/// Unsteady-flow run description loaded from JSON:
///
///   {"dem": "terrain.asc",
///    "inflow": {"segment": [[x1, y1], [x2, y2]], "discharge": 20.0},
///    "config": {"manning_n": 0.035, "duration": 3600, "output_interval": 600},
///    "culverts": [{"path": [[x, y], ...], "width": 4.0, "invert_drop": 0.5}]}
///
/// "hydrograph": [[t, q], ...] may replace "discharge". Relative DEM paths
/// resolve against the scenario file's directory.
struct Scenario
{
	std::filesystem::path dem;
	InflowBoundary inflow;
	SimConfig config;
	std::vector<CulvertEdit> culverts;
};

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario read_scenario(const std::filesystem::path& path);

/// Inverse of parse_scenario; the DEM path is written as given.
std::string format_scenario(const Scenario& scenario);

} // namespace floodrisk

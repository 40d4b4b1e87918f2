#pragma once

#include "floodrisk/dem_builder.hpp"
#include "floodrisk/risk_scoring.hpp"
#include "floodrisk/unsteady_flow.hpp"

#include <cstdint>

// Small synthetic terrains with known behaviour, used by the test suites
// and by the make_fixtures tool.
namespace floodrisk::synthetic {

/// Plane descending eastward with the given slope; origin at (0, 0).
Grid inclined_plane(int cols, int rows, double cell_size, double slope, double base = 100.0);

/// Flat basin enclosed by a one-cell wall ring.
Grid walled_basin(int cols, int rows, double cell_size, double wall_height);

/// South-draining slope with a valley blocked by an east-west highway
/// embankment. Water coming down the valley is diverted along the
/// embankment toward a downstream "geoglyph"; the culvert edit restores the
/// valley path under the embankment.
struct EmbankmentFixture
{
	Grid dem;
	InflowBoundary inflow;
	SimConfig config;
	CulvertEdit culvert;
	GeoglyphRegion geoglyph;
};

EmbankmentFixture embankment_fixture(double discharge = 2.0);

/// Jittered LiDAR-like sample of a valley terrain over [0, size)^2, with
/// `coverage` the chance that a fine cell receives a return.
PointCloud valley_point_cloud(double size, double spacing, double coverage, std::uint64_t seed);

/// Two polygons over valley_point_cloud terrain: one astride the valley
/// floor, one on the higher ground beside it.
std::vector<GeoglyphRegion> valley_geoglyphs(double size);

std::string regions_to_geojson(const std::vector<GeoglyphRegion>& regions);

} // namespace floodrisk::synthetic

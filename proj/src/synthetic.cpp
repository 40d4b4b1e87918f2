#include "floodrisk/synthetic.hpp"

#include <json.hpp>

#include <cmath>
#include <random>

namespace floodrisk::synthetic {

Grid inclined_plane(int cols, int rows, double cell_size, double slope, double base)
{
	Grid g(cols, rows, {0.0, 0.0, cell_size});
	for (int r = 0; r < rows; ++r)
		for (int c = 0; c < cols; ++c)
			g(r, c) = base - slope * (c + 0.5) * cell_size;
	return g;
}

Grid walled_basin(int cols, int rows, double cell_size, double wall_height)
{
	Grid g(cols, rows, {0.0, 0.0, cell_size}, kDefaultNoData, 0.0);
	for (int r = 0; r < rows; ++r)
		for (int c = 0; c < cols; ++c)
			if (r == 0 || c == 0 || r == rows - 1 || c == cols - 1)
				g(r, c) = wall_height;
	return g;
}

EmbankmentFixture embankment_fixture(double discharge)
{
	constexpr int kSize = 60;
	constexpr double kCell = 2.0;
	constexpr double kValleyX = 30.0;
	EmbankmentFixture fx;
	fx.dem = Grid(kSize, kSize, {0.0, 0.0, kCell});
	for (int r = 0; r < kSize; ++r)
		for (int c = 0; c < kSize; ++c) {
			const Point p = fx.dem.cell_center(r, c);
			double z = 10.0 + 0.02 * p.y - 0.004 * p.x;
			const bool embankment = p.y > 60.0 && p.y < 66.0 && p.x < 90.0;
			if (embankment)
				z += 1.5;
			else
				z -= 0.4 * std::max(0.0, 1.0 - std::abs(p.x - kValleyX) / 10.0);
			fx.dem(r, c) = z;
		}
	fx.inflow = InflowBoundary::constant({27.0, 120.0}, {33.0, 120.0}, discharge);
	fx.config.manning_n = 0.035;
	fx.config.duration = 900.0;
	fx.config.output_interval = 300.0;
	fx.culvert = {{{kValleyX, 70.0}, {kValleyX, 56.0}}, 4.0, 0.3};
	fx.geoglyph = {"G1", "hand", {{92.0, 36.0}, {112.0, 36.0}, {112.0, 56.0}, {92.0, 56.0}}};
	return fx;
}

namespace {

double valley_elevation(double x, double y, double size)
{
	const double axis = 0.5 * size + 0.15 * size * std::sin(y / size * 3.0);
	const double valley = 0.6 * std::exp(-std::pow((x - axis) / (0.08 * size), 2.0));
	return 50.0 + 0.04 * y + 0.01 * x - valley + 0.03 * std::sin(x * 1.7) * std::cos(y * 1.3);
}

} // namespace

PointCloud valley_point_cloud(double size, double spacing, double coverage, std::uint64_t seed)
{
	std::mt19937_64 rng(seed);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	PointCloud cloud;
	const int n = static_cast<int>(std::floor(size / spacing));
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j) {
			const double x = (i + unit(rng)) * spacing;
			const double y = (j + unit(rng)) * spacing;
			if (unit(rng) >= coverage)
				continue;
			const double noise = 0.01 * (unit(rng) - 0.5);
			cloud.push_back({x, y, valley_elevation(x, y, size) + noise});
		}
	return cloud;
}

std::vector<GeoglyphRegion> valley_geoglyphs(double size)
{
	const double s = size;
	return {
	    {"g-valley", "lizard", {{0.35 * s, 0.1 * s}, {0.6 * s, 0.1 * s}, {0.6 * s, 0.3 * s}, {0.35 * s, 0.3 * s}}},
	    {"g-upland", "whale", {{0.05 * s, 0.75 * s}, {0.2 * s, 0.75 * s}, {0.2 * s, 0.9 * s}, {0.05 * s, 0.9 * s}}},
	};
}

std::string regions_to_geojson(const std::vector<GeoglyphRegion>& regions)
{
	using nlohmann::ordered_json;
	ordered_json features = ordered_json::array();
	for (const auto& r : regions) {
		ordered_json ring = ordered_json::array();
		for (const auto& p : r.polygon)
			ring.push_back({p.x, p.y});
		ring.push_back({r.polygon.front().x, r.polygon.front().y});
		features.push_back({{"type", "Feature"},
		                    {"properties", {{"id", r.id}, {"name", r.name}}},
		                    {"geometry", {{"type", "Polygon"}, {"coordinates", ordered_json::array({ring})}}}});
	}
	return ordered_json{{"type", "FeatureCollection"}, {"features", features}}.dump(1) + "\n";
}

} // namespace floodrisk::synthetic

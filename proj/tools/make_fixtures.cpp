// Writes the example data set: a highway/culvert flood scenario, a synthetic
// LiDAR point cloud and geoglyph outlines for it.
#include "floodrisk/raster.hpp"
#include "floodrisk/scenario.hpp"
#include "floodrisk/synthetic.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace floodrisk;

namespace {

void write_text(const fs::path& path, const std::string& text)
{
	std::ofstream f(path, std::ios::binary | std::ios::trunc);
	f << text;
	if (!f) {
		std::cerr << "make_fixtures: cannot write " << path << "\n";
		std::exit(1);
	}
}

void write_points(const fs::path& path, const PointCloud& cloud)
{
	std::string text;
	for (const auto& p : cloud)
		text += format_real(p.x) + " " + format_real(p.y) + " " + format_real(p.z) + "\n";
	write_text(path, text);
}

} // namespace

int main(int argc, char** argv)
{
	const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("data");
	fs::create_directories(dir);

	const auto fx = synthetic::embankment_fixture(kExampleInflowDischarge);
	write_ascii_grid(fx.dem, dir / "highway.asc");

	Scenario sc{"highway.asc", fx.inflow, fx.config, {}};
	write_text(dir / "highway_scenario.json", format_scenario(sc));
	sc.culverts = {fx.culvert};
	write_text(dir / "highway_culvert_scenario.json", format_scenario(sc));
	write_text(dir / "highway_geoglyph.geojson", synthetic::regions_to_geojson({fx.geoglyph}));

	constexpr double kSize = 20.0;
	write_points(dir / "valley_points.xyz", synthetic::valley_point_cloud(kSize, 0.1, 0.7, 20240601));
	write_text(dir / "valley_geoglyphs.geojson", synthetic::regions_to_geojson(synthetic::valley_geoglyphs(kSize)));

	std::cout << "fixtures written to " << dir.string() << "\n";
	return 0;
}

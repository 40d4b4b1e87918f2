#include "floodrisk/risk_scoring.hpp"

#include "floodrisk/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace floodrisk {

using nlohmann::json;

double area_to_cell_count(double area_m2, double cell_size)
{
	if (!(area_m2 > 0.0) || !(cell_size > 0.0))
		throw DataError("area and cell size must be positive");
	return area_m2 / (cell_size * cell_size);
}

DangerThreshold DangerThreshold::from_area(double area_m2, double cell_size)
{
	return {area_to_cell_count(area_m2, cell_size), ThresholdSource::Area};
}

std::string DangerThreshold::describe() const
{
	return format_real(cells) + (source == ThresholdSource::CellCount ? " (cell-count constant)"
	                                                                   : " (derived from area)");
}

std::vector<CellIndex> rasterize_polygon(const GeoglyphRegion& region, const RasterGeometry& g)
{
	std::vector<Point> ring = region.polygon;
	if (ring.size() >= 2 && ring.front() == ring.back())
		ring.pop_back();
	if (ring.size() < 3)
		throw DataError("region '" + region.id + "' needs at least 3 vertices");

	const double cs = g.transform.cell_size;
	std::vector<CellIndex> cells;
	std::vector<double> xs;
	for (int row = 0; row < g.height; ++row) {
		const double y = g.transform.origin_y + (g.height - row - 0.5) * cs;
		xs.clear();
		std::vector<std::pair<double, double>> on_edge; // x-spans of horizontal edges at y
		for (std::size_t k = 0; k < ring.size(); ++k) {
			const Point a = ring[k];
			const Point b = ring[(k + 1) % ring.size()];
			if (a.y == y && b.y == y) {
				on_edge.emplace_back(std::min(a.x, b.x), std::max(a.x, b.x));
				continue;
			}
			// Half-open in y so a vertex shared by two edges is counted once.
			if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y))
				xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
			// The topmost point of a non-horizontal edge is on the outline too.
			if (a.y != b.y && y == std::max(a.y, b.y))
				on_edge.emplace_back(a.y > b.y ? a.x : b.x, a.y > b.y ? a.x : b.x);
		}
		std::sort(xs.begin(), xs.end());
		for (int col = 0; col < g.width; ++col) {
			const double x = g.transform.origin_x + (col + 0.5) * cs;
			bool inside = false;
			for (std::size_t k = 0; k + 1 < xs.size(); k += 2)
				if (x >= xs[k] && x <= xs[k + 1]) {
					inside = true;
					break;
				}
			if (!inside)
				for (const auto& [lo, hi] : on_edge)
					if (x >= lo && x <= hi) {
						inside = true;
						break;
					}
			if (inside)
				cells.push_back({row, col});
		}
	}
	if (cells.empty())
		throw DataError("region '" + region.id + "' has no overlapping cells");
	return cells;
}

std::vector<RiskReport> score_geoglyphs(const Grid& ffa, const std::vector<GeoglyphRegion>& regions,
                                        double threshold)
{
	if (!(threshold > 0.0))
		throw DataError("danger threshold must be positive");
	std::vector<RiskReport> reports;
	reports.reserve(regions.size());
	for (const auto& region : regions) {
		RiskReport rep{region.id, region.name};
		double best = -std::numeric_limits<double>::infinity();
		for (const auto& c : rasterize_polygon(region, ffa.geometry())) {
			if (ffa.is_nodata(c.row, c.col))
				continue;
			best = std::max(best, ffa(c.row, c.col));
			++rep.cells_evaluated;
		}
		if (rep.cells_evaluated == 0)
			throw DataError("region '" + region.id + "' covers zero valid cells");
		rep.max_ffa = best;
		rep.log10_max_ffa = std::log10(best);
		rep.unsafe = best >= threshold;
		reports.push_back(std::move(rep));
	}
	std::stable_sort(reports.begin(), reports.end(), [](const RiskReport& a, const RiskReport& b) {
		if (a.max_ffa != b.max_ffa)
			return a.max_ffa > b.max_ffa;
		return a.id < b.id;
	});
	return reports;
}

std::vector<GeoglyphRegion> parse_regions_geojson(std::string_view text)
{
	std::vector<GeoglyphRegion> regions;
	try {
		const json doc = json::parse(text);
		if (doc.value("type", "") != "FeatureCollection")
			throw DataError("regions must be a GeoJSON FeatureCollection");
		std::size_t index = 0;
		for (const auto& feature : doc.at("features")) {
			const auto& geom = feature.at("geometry");
			if (geom.at("type").get<std::string>() != "Polygon")
				throw DataError("feature " + std::to_string(index) + " is not a Polygon");
			const auto& rings = geom.at("coordinates");
			if (rings.size() != 1)
				throw DataError("feature " + std::to_string(index) +
				                (rings.empty() ? " has no ring" : " has holes, which are not supported"));
			GeoglyphRegion region;
			const json props = feature.value("properties", json::object());
			auto text_of = [&](const char* key) -> std::string {
				if (!props.contains(key) || props[key].is_null())
					return std::to_string(index);
				return props[key].is_string() ? props[key].get<std::string>() : props[key].dump();
			};
			region.id = text_of("id");
			region.name = props.contains("name") && props["name"].is_string()
			                  ? props["name"].get<std::string>()
			                  : region.id;
			for (const auto& v : rings.at(0))
				region.polygon.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
			regions.push_back(std::move(region));
			++index;
		}
	} catch (const json::exception& e) {
		throw DataError(std::string("malformed GeoJSON: ") + e.what());
	}
	return regions;
}

std::vector<GeoglyphRegion> read_regions_geojson(const std::filesystem::path& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw IoError("cannot open regions '" + path.string() + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return parse_regions_geojson(ss.str());
}

namespace {

std::string csv_field(const std::string& s)
{
	if (s.find_first_of(",\"\n") == std::string::npos)
		return s;
	std::string out = "\"";
	for (char c : s) {
		if (c == '"')
			out += '"';
		out += c;
	}
	return out + "\"";
}

} // namespace

std::string format_report_csv(const std::vector<RiskReport>& reports)
{
	std::string out = "id,name,max_ffa,log10_max_ffa,unsafe,cells_evaluated\n";
	for (const auto& r : reports)
		out += csv_field(r.id) + "," + csv_field(r.name) + "," + format_real(r.max_ffa) + "," +
		       format_real(r.log10_max_ffa) + "," + (r.unsafe ? "true" : "false") + "," +
		       std::to_string(r.cells_evaluated) + "\n";
	return out;
}

std::string format_report_tsv(const std::vector<RiskReport>& reports)
{
	std::string out = "name\tlog10_max_ffa\n";
	for (const auto& r : reports)
		out += r.name + "\t" + format_real(r.log10_max_ffa) + "\n";
	return out;
}

} // namespace floodrisk

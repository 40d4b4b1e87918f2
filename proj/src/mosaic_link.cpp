#include "floodrisk/mosaic_link.hpp"

#include "floodrisk/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace floodrisk {

namespace {

bool inside_half_open(const Point& p, const RasterGeometry& g)
{
	return p.x >= g.min_x() && p.x < g.max_x() && p.y >= g.min_y() && p.y < g.max_y();
}

} // namespace

std::optional<Point> segment_entry_point(Point a, Point b, double min_x, double min_y, double max_x,
                                         double max_y)
{
	// Liang-Barsky clipping; the entry parameter is where the segment first
	// touches the rectangle.
	const double dx = b.x - a.x, dy = b.y - a.y;
	double t0 = 0.0, t1 = 1.0;
	const double p[4] = {-dx, dx, -dy, dy};
	const double q[4] = {a.x - min_x, max_x - a.x, a.y - min_y, max_y - a.y};
	for (int k = 0; k < 4; ++k) {
		if (p[k] == 0.0) {
			if (q[k] < 0.0)
				return std::nullopt;
			continue;
		}
		const double t = q[k] / p[k];
		if (p[k] < 0.0)
			t0 = std::max(t0, t);
		else
			t1 = std::min(t1, t);
		if (t0 > t1)
			return std::nullopt;
	}
	return Point{a.x + t0 * dx, a.y + t0 * dy};
}

std::vector<BoundaryCrossing> find_boundary_crossings(const StreamNetwork& coarse_network,
                                                      const RasterGeometry& coarse_geometry,
                                                      const RasterGeometry& fine_geometry,
                                                      double min_accum)
{
	const auto& c = coarse_geometry;
	const auto& f = fine_geometry;
	if (c.max_x() <= f.min_x() || c.min_x() >= f.max_x() || c.max_y() <= f.min_y() ||
	    c.min_y() >= f.max_y())
		throw DataError("coarse and fine grids do not overlap; check that they share a CRS");

	std::vector<BoundaryCrossing> out;
	for (const auto& link : coarse_network.links) {
		for (std::size_t k = 0; k + 1 < link.cells.size(); ++k) {
			const Point a = c.cell_center(link.cells[k].row, link.cells[k].col);
			const Point b = c.cell_center(link.cells[k + 1].row, link.cells[k + 1].col);
			if (inside_half_open(a, f) || !inside_half_open(b, f))
				continue;
			const auto entry = segment_entry_point(a, b, f.min_x(), f.min_y(), f.max_x(), f.max_y());
			if (entry && link.accumulation[k] >= min_accum)
				out.push_back({link.id, *entry, link.accumulation[k]});
			break;
		}
	}
	return out;
}

std::vector<InletSeed> derive_inlet_seeds(const StreamNetwork& coarse_network,
                                          const RasterGeometry& coarse_geometry, const Grid& fine_grid,
                                          double min_accum)
{
	const auto fine = fine_grid.geometry();
	const auto crossings = find_boundary_crossings(coarse_network, coarse_geometry, fine, min_accum);
	const double ratio = coarse_geometry.transform.cell_size / fine.transform.cell_size;

	std::vector<CellIndex> ring;
	for (int r = 0; r < fine.height; ++r)
		for (int col = 0; col < fine.width; ++col)
			if ((r == 0 || col == 0 || r == fine.height - 1 || col == fine.width - 1) &&
			    !fine_grid.is_nodata(r, col))
				ring.push_back({r, col});
	if (ring.empty() && !crossings.empty())
		throw DataError("fine grid has no valid boundary cell to receive inlet seeds");

	std::vector<InletSeed> seeds;
	for (const auto& crossing : crossings) {
		// `ring` is row-major, so a strict comparison keeps the smallest (row, col) on ties.
		double best_d2 = std::numeric_limits<double>::infinity();
		CellIndex best{};
		for (const auto& cell : ring) {
			const Point p = fine.cell_center(cell.row, cell.col);
			const double d2 = (p.x - crossing.point.x) * (p.x - crossing.point.x) +
			                  (p.y - crossing.point.y) * (p.y - crossing.point.y);
			if (d2 < best_d2) {
				best_d2 = d2;
				best = cell;
			}
		}
		seeds.push_back({best, crossing.coarse_accumulation * ratio * ratio});
	}
	return seeds;
}

std::string format_seeds(const std::vector<InletSeed>& seeds)
{
	std::string out;
	for (const auto& s : seeds)
		out += std::to_string(s.cell.row) + " " + std::to_string(s.cell.col) + " " +
		       format_real(s.accumulation) + "\n";
	return out;
}

std::vector<InletSeed> parse_seeds(std::string_view text)
{
	std::vector<InletSeed> seeds;
	std::istringstream in{std::string(text)};
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line)) {
		++line_no;
		const auto first = line.find_first_not_of(" \t\r");
		if (first == std::string::npos || line[first] == '#')
			continue;
		std::istringstream fields(line);
		std::string r, c, a, extra;
		fields >> r >> c >> a;
		InletSeed seed;
		auto ok_int = [](const std::string& s, int& v) {
			auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
			return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
		};
		auto ok_real = [](const std::string& s, double& v) {
			auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
			return !s.empty() && ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v);
		};
		if (!ok_int(r, seed.cell.row) || !ok_int(c, seed.cell.col) || !ok_real(a, seed.accumulation) ||
		    (fields >> extra) || seed.accumulation < 0.0)
			throw DataError("seed line " + std::to_string(line_no) +
			                ": expected 'row col accumulation' with accumulation >= 0");
		seeds.push_back(seed);
	}
	return seeds;
}

void write_seeds(const std::vector<InletSeed>& seeds, const std::filesystem::path& path)
{
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw IoError("cannot write seeds '" + path.string() + "'");
	out << format_seeds(seeds);
}

std::vector<InletSeed> read_seeds(const std::filesystem::path& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw IoError("cannot open seeds '" + path.string() + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return parse_seeds(ss.str());
}

} // namespace floodrisk

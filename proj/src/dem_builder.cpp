#include "floodrisk/dem_builder.hpp"

#include "floodrisk/error.hpp"
#include "floodrisk/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace floodrisk {

namespace {

// Cells spanning [0, span) at `resolution`; the small slack absorbs spans that
// are an exact multiple of the resolution up to rounding.
int cell_count(double span, double resolution)
{
	const double n = std::ceil(span / resolution - 1e-9);
	if (!(n >= 1.0) || n > std::numeric_limits<int>::max())
		throw DataError("extent is empty or too large for the resolution");
	return static_cast<int>(n);
}

bool parse_token(std::string_view s, double& out)
{
	const char* first = s.data();
	const char* last = s.data() + s.size();
	if (first != last && *first == '+')
		++first;
	auto [ptr, ec] = std::from_chars(first, last, out);
	return ec == std::errc() && ptr == last && std::isfinite(out);
}

} // namespace

Extent Extent::enclosing(const PointCloud& cloud, double resolution)
{
	if (cloud.empty())
		throw DataError("cannot derive an extent from an empty point cloud");
	Extent e{cloud[0].x, cloud[0].y, cloud[0].x, cloud[0].y};
	for (const auto& p : cloud) {
		e.min_x = std::min(e.min_x, p.x);
		e.min_y = std::min(e.min_y, p.y);
		e.max_x = std::max(e.max_x, p.x);
		e.max_y = std::max(e.max_y, p.y);
	}
	// Snap the origin to a multiple of the resolution.
	auto snap = [resolution](double v) {
		double s = std::floor(v / resolution) * resolution;
		return s > v ? s - resolution : s;
	};
	e.min_x = snap(e.min_x);
	e.min_y = snap(e.min_y);
	e.max_x = e.min_x + (std::floor((e.max_x - e.min_x) / resolution) + 1.0) * resolution;
	e.max_y = e.min_y + (std::floor((e.max_y - e.min_y) / resolution) + 1.0) * resolution;
	return e;
}

PointCloud parse_point_cloud(std::string_view text)
{
	PointCloud cloud;
	std::size_t line_no = 0;
	while (!text.empty()) {
		const std::size_t nl = text.find('\n');
		std::string_view line = text.substr(0, nl);
		text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
		++line_no;

		const auto first = line.find_first_not_of(" \t\r");
		if (first == std::string_view::npos || line[first] == '#')
			continue;

		double xyz[3];
		int n = 0;
		std::size_t pos = first;
		while (pos < line.size()) {
			const auto end = line.find_first_of(" \t\r,", pos);
			const auto tok = line.substr(pos, end == std::string_view::npos ? end : end - pos);
			if (!tok.empty()) {
				if (n == 3 || !parse_token(tok, xyz[n]))
					throw DataError("point cloud line " + std::to_string(line_no) +
					                ": expected 'x y z'");
				++n;
			}
			if (end == std::string_view::npos)
				break;
			pos = end + 1;
		}
		if (n != 3)
			throw DataError("point cloud line " + std::to_string(line_no) + ": expected 'x y z'");
		cloud.push_back({xyz[0], xyz[1], xyz[2]});
	}
	return cloud;
}

PointCloud read_point_cloud(const std::filesystem::path& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw IoError("cannot open point cloud '" + path.string() + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	try {
		return parse_point_cloud(ss.str());
	} catch (const DataError& e) {
		throw DataError(path.string() + ": " + e.what());
	}
}

Grid rasterize_points(const PointCloud& cloud, const DemBuildConfig& config)
{
	const Extent& e = config.extent;
	const double res = config.fine_resolution;
	if (!(res > 0.0))
		throw DataError("fine resolution must be positive");
	if (!(e.max_x > e.min_x) || !(e.max_y > e.min_y))
		throw DataError("empty extent");

	const int width = cell_count(e.max_x - e.min_x, res);
	const int height = cell_count(e.max_y - e.min_y, res);
	Grid grid(width, height, {e.min_x, e.min_y, res}, config.nodata, config.nodata);

	for (const auto& p : cloud) {
		if (!(p.x >= e.min_x && p.x < e.max_x && p.y >= e.min_y && p.y < e.max_y))
			continue;
		const double fc = std::floor((p.x - e.min_x) / res);
		const double fr = std::floor((p.y - e.min_y) / res);
		if (fc < 0 || fr < 0 || fc >= width || fr >= height)
			continue;
		const int row = height - 1 - static_cast<int>(fr);
		double& cell = grid(row, static_cast<int>(fc));
		if (cell == grid.nodata() || p.z < cell)
			cell = p.z;
	}
	return grid;
}

Grid aggregate_min(const Grid& grid, int factor)
{
	if (factor < 1)
		throw DataError("aggregate factor must be >= 1");
	const int out_w = (grid.width() + factor - 1) / factor;
	const int out_h = (grid.height() + factor - 1) / factor;
	GeoTransform t = grid.transform();
	t.cell_size *= factor;
	Grid out(out_w, out_h, t, grid.nodata(), grid.nodata());

	// Rows are counted from the south edge so blocks line up with the origin.
	parallel_for(0, static_cast<std::size_t>(out_h), [&](std::size_t orow) {
		const int out_from_south = out_h - 1 - static_cast<int>(orow);
		const int south_lo = out_from_south * factor;
		const int south_hi = std::min(south_lo + factor, grid.height());
		for (int ocol = 0; ocol < out_w; ++ocol) {
			const int col_lo = ocol * factor;
			const int col_hi = std::min(col_lo + factor, grid.width());
			double best = grid.nodata();
			bool found = false;
			for (int s = south_lo; s < south_hi; ++s) {
				const int row = grid.height() - 1 - s;
				for (int col = col_lo; col < col_hi; ++col) {
					if (grid.is_nodata(row, col))
						continue;
					const double v = grid(row, col);
					if (!found || v < best) {
						best = v;
						found = true;
					}
				}
			}
			out(static_cast<int>(orow), ocol) = best;
		}
	});
	return out;
}

Grid fill_nodata_linear(const Grid& grid)
{
	if (grid.valid_count() == 0)
		throw DataError("cannot interpolate: grid is entirely nodata");

	const int w = grid.width();
	const int h = grid.height();
	Grid out = grid;

	auto nearest_valid = [&](int row, int col) {
		// Ring search in Chebyshev distance; any cell on ring k is at least k away.
		long long best_d2 = std::numeric_limits<long long>::max();
		CellIndex best{};
		for (int k = 1; k <= std::max(w, h); ++k) {
			if (static_cast<long long>(k) * k > best_d2)
				break;
			for (int dr = -k; dr <= k; ++dr) {
				const int step = (dr == -k || dr == k) ? 1 : 2 * k;
				for (int dc = -k; dc <= k; dc += step) {
					const int r = row + dr, c = col + dc;
					if (!grid.is_valid(r, c))
						continue;
					const long long d2 = static_cast<long long>(dr) * dr + static_cast<long long>(dc) * dc;
					const CellIndex cand{r, c};
					if (d2 < best_d2 || (d2 == best_d2 && cand < best)) {
						best_d2 = d2;
						best = cand;
					}
				}
			}
		}
		return grid(best.row, best.col);
	};

	auto lerp = [](double v0, int p0, double v1, int p1, int p) {
		return ((p1 - p) * v0 + (p - p0) * v1) / (p1 - p0);
	};

	// Nearest valid row above and below every cell, by column sweeps.
	std::vector<int> north_of(grid.size(), -1), south_of(grid.size(), h);
	parallel_for(0, static_cast<std::size_t>(w), [&](std::size_t ucol) {
		const int col = static_cast<int>(ucol);
		int last = -1;
		for (int row = 0; row < h; ++row) {
			north_of[grid.index(row, col)] = last;
			if (!grid.is_nodata(row, col))
				last = row;
		}
		last = h;
		for (int row = h - 1; row >= 0; --row) {
			south_of[grid.index(row, col)] = last;
			if (!grid.is_nodata(row, col))
				last = row;
		}
	});

	parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t urow) {
		const int row = static_cast<int>(urow);
		std::vector<int> east_of(static_cast<std::size_t>(w));
		int next = w;
		for (int col = w - 1; col >= 0; --col) {
			east_of[static_cast<std::size_t>(col)] = next;
			if (!grid.is_nodata(row, col))
				next = col;
		}
		int west = -1;
		for (int col = 0; col < w; ++col) {
			if (!grid.is_nodata(row, col)) {
				west = col;
				continue;
			}
			const int east = east_of[static_cast<std::size_t>(col)];
			if (west >= 0 && east < w) {
				out(row, col) = lerp(grid(row, west), west, grid(row, east), east, col);
				continue;
			}
			const int north = north_of[grid.index(row, col)];
			const int south = south_of[grid.index(row, col)];
			if (north >= 0 && south < h) {
				out(row, col) = lerp(grid(north, col), north, grid(south, col), south, row);
				continue;
			}
			out(row, col) = nearest_valid(row, col);
		}
	});
	return out;
}

Grid build_dem(const PointCloud& cloud, const DemBuildConfig& config)
{
	return fill_nodata_linear(aggregate_min(rasterize_points(cloud, config), config.aggregate_factor));
}

} // namespace floodrisk

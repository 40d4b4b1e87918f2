#include "floodrisk/hydrology.hpp"

#include "floodrisk/error.hpp"
#include "floodrisk/parallel.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <queue>
#include <sstream>
#include <tuple>

namespace floodrisk {

namespace {

constexpr int kNoDataCode = static_cast<int>(kDefaultNoData);

std::string describe(const CellIndex& c)
{
	return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

} // namespace

int esri_code(FlowCode code)
{
	switch (code) {
	case FlowCode::E: return 1;
	case FlowCode::SE: return 2;
	case FlowCode::S: return 4;
	case FlowCode::SW: return 8;
	case FlowCode::W: return 16;
	case FlowCode::NW: return 32;
	case FlowCode::N: return 64;
	case FlowCode::NE: return 128;
	case FlowCode::Outlet: return 0;
	case FlowCode::NoData: return kNoDataCode;
	}
	return kNoDataCode;
}

bool is_boundary_cell(const Grid& grid, int row, int col)
{
	if (!grid.is_valid(row, col))
		return false;
	if (row == 0 || col == 0 || row == grid.height() - 1 || col == grid.width() - 1)
		return true;
	for (int k = 0; k < kD8Count; ++k)
		if (grid.is_nodata(row + kD8RowOffset[k], col + kD8ColOffset[k]))
			return true;
	return false;
}

FlowDirGrid::FlowDirGrid(RasterGeometry geometry)
    : geometry_(geometry),
      direction_(static_cast<std::size_t>(geometry.width) * static_cast<std::size_t>(geometry.height),
                 FlowCode::NoData),
      steepness_(direction_.size(), 0.0)
{
}

std::optional<std::size_t> FlowDirGrid::downstream(std::size_t i) const
{
	const FlowCode code = direction_[i];
	if (code == FlowCode::Outlet || code == FlowCode::NoData)
		return std::nullopt;
	const int k = static_cast<int>(code);
	const int row = static_cast<int>(i / static_cast<std::size_t>(width())) + kD8RowOffset[k];
	const int col = static_cast<int>(i % static_cast<std::size_t>(width())) + kD8ColOffset[k];
	if (row < 0 || col < 0 || row >= height() || col >= width())
		throw DataError("flow direction at cell " + std::to_string(i) + " points off the grid");
	return index(row, col);
}

Grid FlowDirGrid::code_grid() const
{
	Grid g(width(), height(), geometry_.transform, kDefaultNoData);
	for (std::size_t i = 0; i < size(); ++i)
		g[i] = esri_code(direction_[i]);
	return g;
}

Grid FlowDirGrid::steepness_grid() const
{
	Grid g(width(), height(), geometry_.transform, kDefaultNoData);
	for (std::size_t i = 0; i < size(); ++i)
		g[i] = direction_[i] == FlowCode::NoData ? kDefaultNoData : steepness_[i];
	return g;
}

FlowDirGrid FlowDirGrid::from_code_grid(const Grid& codes)
{
	FlowDirGrid fd(codes.geometry());
	for (std::size_t i = 0; i < codes.size(); ++i) {
		if (codes.is_nodata(i))
			continue;
		const double v = codes[i];
		if (v == 0.0) {
			fd.direction_[i] = FlowCode::Outlet;
			continue;
		}
		bool matched = false;
		for (int k = 0; k < kD8Count; ++k) {
			if (v == esri_code(static_cast<FlowCode>(k))) {
				fd.direction_[i] = static_cast<FlowCode>(k);
				matched = true;
				break;
			}
		}
		if (!matched)
			throw DataError("invalid flow direction code " + format_real(v) + " at cell " +
			                describe(codes.cell(i)));
	}
	for (std::size_t i = 0; i < fd.size(); ++i)
		fd.downstream(i); // validates that no code leaves the grid
	return fd;
}

Grid fill_depressions(const Grid& dem, double epsilon)
{
	if (dem.valid_count() == 0)
		throw DataError("cannot fill depressions: grid is entirely nodata");
	if (!(epsilon >= 0.0))
		throw DataError("fill epsilon must be non-negative");

	Grid out = dem;
	std::vector<char> closed(dem.size(), 0);
	// (elevation, index); the index tie-break keeps the visiting order
	// deterministic, the resulting surface does not depend on it.
	using Entry = std::pair<double, std::size_t>;
	std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

	for (int r = 0; r < dem.height(); ++r)
		for (int c = 0; c < dem.width(); ++c)
			if (is_boundary_cell(dem, r, c)) {
				const std::size_t i = dem.index(r, c);
				closed[i] = 1;
				open.emplace(dem[i], i);
			}

	while (!open.empty()) {
		const auto [level, i] = open.top();
		open.pop();
		const CellIndex cell = dem.cell(i);
		for (int k = 0; k < kD8Count; ++k) {
			const int r = cell.row + kD8RowOffset[k];
			const int c = cell.col + kD8ColOffset[k];
			if (!dem.is_valid(r, c))
				continue;
			const std::size_t n = dem.index(r, c);
			if (closed[n])
				continue;
			closed[n] = 1;
			if (out[n] <= level)
				out[n] = level + epsilon;
			open.emplace(out[n], n);
		}
	}
	return out;
}

FlowDirGrid compute_flow_direction(const Grid& filled_dem)
{
	const Grid& dem = filled_dem;
	FlowDirGrid fd(dem.geometry());
	const double cardinal = dem.cell_size();
	const double diagonal = dem.cell_size() * std::numbers::sqrt2;

	parallel_for(0, static_cast<std::size_t>(dem.height()), [&](std::size_t urow) {
		const int row = static_cast<int>(urow);
		for (int col = 0; col < dem.width(); ++col) {
			const std::size_t i = dem.index(row, col);
			if (dem.is_nodata(i))
				continue;
			int best = -1;
			double best_slope = 0.0;
			for (int k = 0; k < kD8Count; ++k) {
				const int r = row + kD8RowOffset[k];
				const int c = col + kD8ColOffset[k];
				if (!dem.is_valid(r, c))
					continue;
				const double drop = dem[i] - dem(r, c);
				if (!(drop > 0.0))
					continue;
				const double slope = drop / (k % 2 == 0 ? cardinal : diagonal);
				if (best < 0 || slope > best_slope) {
					best = k;
					best_slope = slope;
				}
			}
			if (best >= 0) {
				fd.direction(i) = static_cast<FlowCode>(best);
				fd.steepness(i) = best_slope;
			} else if (is_boundary_cell(dem, row, col)) {
				fd.direction(i) = FlowCode::Outlet;
			} else {
				throw DataError("cell " + describe({row, col}) +
				                " has no lower neighbor; fill depressions first");
			}
		}
	});
	return fd;
}

std::vector<std::size_t> topological_order(const FlowDirGrid& flowdir)
{
	const std::size_t n = flowdir.size();
	std::vector<std::uint8_t> indegree(n, 0);
	std::vector<std::optional<std::size_t>> down(n);
	std::size_t valid = 0;
	for (std::size_t i = 0; i < n; ++i) {
		if (flowdir.direction(i) == FlowCode::NoData)
			continue;
		++valid;
		down[i] = flowdir.downstream(i);
		if (down[i]) {
			if (flowdir.direction(*down[i]) == FlowCode::NoData)
				throw DataError("flow direction at cell " + describe(CellIndex{
				    static_cast<int>(i / static_cast<std::size_t>(flowdir.width())),
				    static_cast<int>(i % static_cast<std::size_t>(flowdir.width()))}) +
				                " drains into nodata");
			++indegree[*down[i]];
		}
	}

	std::vector<std::size_t> order;
	order.reserve(valid);
	for (std::size_t i = 0; i < n; ++i)
		if (flowdir.direction(i) != FlowCode::NoData && indegree[i] == 0)
			order.push_back(i);
	for (std::size_t head = 0; head < order.size(); ++head) {
		const auto d = down[order[head]];
		if (d && --indegree[*d] == 0)
			order.push_back(*d);
	}

	if (order.size() != valid) {
		// Any cell left with positive indegree leads into a cycle.
		std::size_t start = 0;
		while (flowdir.direction(start) == FlowCode::NoData || indegree[start] == 0)
			++start;
		std::vector<std::size_t> seen_at(n, n);
		std::vector<std::size_t> path;
		std::size_t cur = start;
		while (seen_at[cur] == n) {
			seen_at[cur] = path.size();
			path.push_back(cur);
			cur = *down[cur];
		}
		std::ostringstream msg;
		msg << "flow direction cycle:";
		const auto w = static_cast<std::size_t>(flowdir.width());
		for (std::size_t k = seen_at[cur]; k < path.size(); ++k)
			msg << ' ' << describe({static_cast<int>(path[k] / w), static_cast<int>(path[k] % w)});
		throw DataError(msg.str());
	}
	return order;
}

Grid compute_flow_accumulation(const FlowDirGrid& flowdir, std::span<const InletSeed> seeds)
{
	const auto& geo = flowdir.geometry();
	Grid acc(geo.width, geo.height, geo.transform, kDefaultNoData, kDefaultNoData);
	for (std::size_t i = 0; i < flowdir.size(); ++i)
		if (flowdir.direction(i) != FlowCode::NoData)
			acc[i] = 1.0;

	for (const auto& seed : seeds) {
		if (!acc.contains(seed.cell.row, seed.cell.col))
			throw DataError("seed " + describe(seed.cell) + " lies outside the grid");
		const std::size_t i = acc.index(seed.cell.row, seed.cell.col);
		if (acc.is_nodata(i))
			throw DataError("seed " + describe(seed.cell) + " lies on a nodata cell");
		acc[i] += seed.accumulation;
	}

	for (const std::size_t i : topological_order(flowdir))
		if (const auto d = flowdir.downstream(i))
			acc[*d] += acc[i];
	return acc;
}

Grid label_watersheds(const FlowDirGrid& flowdir)
{
	const auto& geo = flowdir.geometry();
	Grid labels(geo.width, geo.height, geo.transform, kDefaultNoData, kDefaultNoData);
	double next = 1.0;
	for (std::size_t i = 0; i < flowdir.size(); ++i)
		if (flowdir.direction(i) == FlowCode::Outlet)
			labels[i] = next++;

	const auto order = topological_order(flowdir);
	for (auto it = order.rbegin(); it != order.rend(); ++it)
		if (const auto d = flowdir.downstream(*it))
			labels[*it] = labels[*d];
	return labels;
}

} // namespace floodrisk

#include "floodrisk/unsteady_flow.hpp"

#include "floodrisk/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace floodrisk {

InflowBoundary InflowBoundary::constant(Point from, Point to, double discharge)
{
	return {from, to, {{0.0, discharge}}};
}

double InflowBoundary::discharge_at(double t) const
{
	if (hydrograph.empty())
		return 0.0;
	if (t <= hydrograph.front().first)
		return hydrograph.front().second;
	if (t >= hydrograph.back().first)
		return hydrograph.back().second;
	const auto hi = std::upper_bound(hydrograph.begin(), hydrograph.end(), t,
	                                 [](double v, const auto& e) { return v < e.first; });
	const auto lo = hi - 1;
	const double f = (t - lo->first) / (hi->first - lo->first);
	return lo->second + f * (hi->second - lo->second);
}

void InflowBoundary::validate() const
{
	if (hydrograph.empty())
		throw DataError("inflow needs a discharge or a hydrograph");
	for (std::size_t k = 0; k < hydrograph.size(); ++k) {
		const auto& [t, q] = hydrograph[k];
		if (!std::isfinite(t) || !std::isfinite(q) || q < 0.0)
			throw DataError("inflow discharge must be finite and >= 0");
		if (k > 0 && !(t > hydrograph[k - 1].first))
			throw DataError("hydrograph times must be strictly increasing");
	}
}

void SimConfig::validate() const
{
	if (!(manning_n > 0.0))
		throw DataError("manning_n must be positive");
	if (!(cfl > 0.0 && cfl <= 1.0))
		throw DataError("cfl must lie in (0, 1]");
	if (!(duration > 0.0))
		throw DataError("duration must be positive");
	if (!(dry_depth > 0.0))
		throw DataError("dry_depth must be positive");
	if (!(max_dt > 0.0))
		throw DataError("max_dt must be positive");
}

double FlowState::stored_volume() const
{
	const double area = depth.cell_size() * depth.cell_size();
	double v = 0.0;
	for (std::size_t i = 0; i < depth.size(); ++i)
		v += depth[i] * area;
	return v;
}

double distance_to_polyline(Point p, const std::vector<Point>& path)
{
	if (path.empty())
		return std::numeric_limits<double>::infinity();
	double best = std::hypot(p.x - path[0].x, p.y - path[0].y);
	for (std::size_t k = 0; k + 1 < path.size(); ++k) {
		const Point a = path[k], b = path[k + 1];
		const double dx = b.x - a.x, dy = b.y - a.y;
		const double len2 = dx * dx + dy * dy;
		double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
		t = std::clamp(t, 0.0, 1.0);
		best = std::min(best, std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy)));
	}
	return best;
}

std::vector<CellIndex> culvert_cells(const Grid& dem, const CulvertEdit& edit)
{
	if (edit.path.empty())
		throw DataError("culvert path is empty");
	if (!(edit.width >= dem.cell_size()))
		throw DataError("culvert width must be at least one cell");
	const double radius = edit.width / 2.0;
	std::vector<CellIndex> cells;
	for (int r = 0; r < dem.height(); ++r)
		for (int c = 0; c < dem.width(); ++c)
			if (distance_to_polyline(dem.cell_center(r, c), edit.path) <= radius)
				cells.push_back({r, c});
	return cells;
}

Grid carve_culvert(const Grid& dem, const CulvertEdit& edit)
{
	if (!(edit.invert_drop > 0.0))
		throw DataError("culvert invert drop must be positive");
	std::vector<CellIndex> cells = culvert_cells(dem, edit);
	std::erase_if(cells, [&](const CellIndex& c) { return dem.is_nodata(c.row, c.col); });
	if (cells.empty())
		throw DataError("culvert path does not intersect any valid cell");

	double bed = std::numeric_limits<double>::infinity();
	for (const auto& c : cells)
		bed = std::min(bed, dem(c.row, c.col));
	bed -= edit.invert_drop;

	Grid out = dem;
	for (const auto& c : cells)
		out(c.row, c.col) = bed;
	return out;
}

namespace {

bool segment_touches_box(Point a, Point b, double x0, double y0, double x1, double y1)
{
	const double dx = b.x - a.x, dy = b.y - a.y;
	double t0 = 0.0, t1 = 1.0;
	const double p[4] = {-dx, dx, -dy, dy};
	const double q[4] = {a.x - x0, x1 - a.x, a.y - y0, y1 - a.y};
	for (int k = 0; k < 4; ++k) {
		if (p[k] == 0.0) {
			if (q[k] < 0.0)
				return false;
			continue;
		}
		const double t = q[k] / p[k];
		if (p[k] < 0.0)
			t0 = std::max(t0, t);
		else
			t1 = std::min(t1, t);
		if (t0 > t1)
			return false;
	}
	return true;
}

} // namespace

std::vector<CellIndex> inflow_cells(const Grid& dem, const InflowBoundary& inflow)
{
	std::vector<CellIndex> crossed, ring;
	const double cs = dem.cell_size();
	for (int r = 0; r < dem.height(); ++r) {
		const double y0 = dem.transform().origin_y + (dem.height() - r - 1) * cs;
		for (int c = 0; c < dem.width(); ++c) {
			if (dem.is_nodata(r, c))
				continue;
			const double x0 = dem.transform().origin_x + c * cs;
			if (!segment_touches_box(inflow.from, inflow.to, x0, y0, x0 + cs, y0 + cs))
				continue;
			crossed.push_back({r, c});
			if (r == 0 || c == 0 || r == dem.height() - 1 || c == dem.width() - 1)
				ring.push_back({r, c});
		}
	}
	return ring.empty() ? crossed : ring;
}

std::vector<FlowState> simulate(const Grid& dem, const InflowBoundary& inflow, const SimConfig& config)
{
	config.validate();
	inflow.validate();
	if (dem.valid_count() != dem.size())
		throw DataError("simulation DEM contains nodata; fill it first");

	const int W = dem.width();
	const int H = dem.height();
	const auto uW = static_cast<std::size_t>(W);
	const double dx = dem.cell_size();
	const double area = dx * dx;
	const double g = kGravity;
	const double n2 = config.manning_n * config.manning_n;
	const double dry = config.dry_depth;

	const auto sources = inflow_cells(dem, inflow);
	if (sources.empty())
		throw DataError("inflow segment does not cross any grid cell");
	std::vector<double> source_share(dem.size(), 0.0);
	for (const auto& c : sources)
		source_share[dem.index(c.row, c.col)] = 1.0 / static_cast<double>(sources.size());
	const double max_share = 1.0 / static_cast<double>(sources.size());

	// Bed slope continuing outward across each open edge face; negative
	// (uphill) slopes do not drive outflow.
	auto outward = [&](double inner, double edge) { return std::max(0.0, (inner - edge) / dx); };
	std::vector<double> west_slope(static_cast<std::size_t>(H), 0.0), east_slope(west_slope);
	std::vector<double> north_slope(uW, 0.0), south_slope(north_slope);
	for (int r = 0; r < H && W > 1; ++r) {
		west_slope[static_cast<std::size_t>(r)] = outward(dem(r, 1), dem(r, 0));
		east_slope[static_cast<std::size_t>(r)] = outward(dem(r, W - 2), dem(r, W - 1));
	}
	for (int c = 0; c < W && H > 1; ++c) {
		north_slope[static_cast<std::size_t>(c)] = outward(dem(1, c), dem(0, c));
		south_slope[static_cast<std::size_t>(c)] = outward(dem(H - 2, c), dem(H - 1, c));
	}

	FlowState s;
	s.depth = Grid::like(dem, 0.0, kDefaultNoData);
	s.qx = Grid(W + 1, H, dem.transform(), kDefaultNoData, 0.0);
	s.qy = Grid(W, H + 1, dem.transform(), kDefaultNoData, 0.0);
	s.max_depth = s.depth;
	s.throughflow = s.depth;

	auto qx_at = [&](int r, int face) -> double& { return s.qx[static_cast<std::size_t>(r) * (uW + 1) + static_cast<std::size_t>(face)]; };
	auto qy_at = [&](int face, int c) -> double& { return s.qy[static_cast<std::size_t>(face) * uW + static_cast<std::size_t>(c)]; };

	// Semi-implicit friction update shared by interior and edge faces.
	auto inertial = [&](double q, double hf, double slope, double dt) {
		const double friction = 1.0 + g * dt * n2 * std::abs(q) / (hf * hf * std::cbrt(hf));
		return (q - g * hf * dt * slope) / friction;
	};
	auto outfall = [&](double q_out, double h, double slope, double dt) {
		if (h <= dry || slope <= 0.0)
			return 0.0;
		return std::max(0.0, inertial(q_out, h, -slope, dt));
	};

	std::vector<FlowState> snapshots{s};
	std::vector<double> factor(dem.size(), 1.0);
	const std::size_t n_rows = static_cast<std::size_t>(H);

	double next_output = config.output_interval > 0.0 ? config.output_interval : config.duration;
	while (s.t < config.duration) {
		const double target = std::min(next_output, config.duration);
		double h_max = 0.0;
		for (std::size_t i = 0; i < s.depth.size(); ++i)
			h_max = std::max(h_max, s.depth[i]);
		const double q_in = inflow.discharge_at(s.t);
		double dt = config.cfl * dx / std::sqrt(g * std::max(h_max, dry));
		// A source cell gains rate * dt per step; keep that depth within the
		// same wave-speed bound.
		const double rate = q_in * max_share / area;
		if (rate > 0.0)
			dt = std::min(dt, std::cbrt(std::pow(config.cfl * dx, 2.0) / (g * rate)));
		dt = std::min(dt, config.max_dt);
		const bool reaches_target = dt >= target - s.t;
		if (reaches_target)
			dt = target - s.t;

		// Momentum: interior faces, then open edges (outflow only).
		parallel_for(0, n_rows, [&](std::size_t ur) {
			const int r = static_cast<int>(ur);
			for (int f = 1; f < W; ++f) {
				const double zl = dem(r, f - 1), zr = dem(r, f);
				const double hl = s.depth(r, f - 1), hr = s.depth(r, f);
				const double hf = std::max(zl + hl, zr + hr) - std::max(zl, zr);
				double& q = qx_at(r, f);
				q = hf > dry ? inertial(q, hf, ((zr + hr) - (zl + hl)) / dx, dt) : 0.0;
			}
			const auto row = static_cast<std::size_t>(r);
			qx_at(r, 0) = -outfall(-qx_at(r, 0), s.depth(r, 0), west_slope[row], dt);
			qx_at(r, W) = outfall(qx_at(r, W), s.depth(r, W - 1), east_slope[row], dt);
		});
		parallel_for(0, n_rows + 1, [&](std::size_t uf) {
			const int f = static_cast<int>(uf);
			for (int c = 0; c < W; ++c) {
				const auto col = static_cast<std::size_t>(c);
				double& q = qy_at(f, c);
				if (f == 0) {
					q = outfall(q, s.depth(0, c), north_slope[col], dt);
				} else if (f == H) {
					q = -outfall(-q, s.depth(H - 1, c), south_slope[col], dt);
				} else {
					const double zn = dem(f - 1, c), zs = dem(f, c);
					const double hn = s.depth(f - 1, c), hs = s.depth(f, c);
					const double hf = std::max(zn + hn, zs + hs) - std::max(zn, zs);
					q = hf > dry ? inertial(q, hf, ((zn + hn) - (zs + hs)) / dx, dt) : 0.0;
				}
			}
		});

		// Positivity: scale each cell's outgoing faces to the water it holds.
		parallel_for(0, n_rows, [&](std::size_t ur) {
			const int r = static_cast<int>(ur);
			for (int c = 0; c < W; ++c) {
				const std::size_t i = dem.index(r, c);
				const double out = (std::max(0.0, -qx_at(r, c)) + std::max(0.0, qx_at(r, c + 1))) +
				                   (std::max(0.0, qy_at(r, c)) + std::max(0.0, -qy_at(r + 1, c)));
				const double out_volume = out * dx * dt;
				const double available = s.depth[i] * area + q_in * source_share[i] * dt;
				factor[i] = out_volume > available ? available / out_volume : 1.0;
			}
		});
		parallel_for(0, n_rows + 1, [&](std::size_t uf) {
			const int f = static_cast<int>(uf);
			if (f < H)
				for (int c = 0; c <= W; ++c) {
					double& q = qx_at(f, c);
					if (q > 0.0 && c > 0)
						q *= factor[dem.index(f, c - 1)];
					else if (q < 0.0 && c < W)
						q *= factor[dem.index(f, c)];
				}
			for (int c = 0; c < W; ++c) {
				double& q = qy_at(f, c);
				if (q > 0.0 && f < H)
					q *= factor[dem.index(f, c)];
				else if (q < 0.0 && f > 0)
					q *= factor[dem.index(f - 1, c)];
			}
		});

		// Continuity.
		parallel_for(0, n_rows, [&](std::size_t ur) {
			const int r = static_cast<int>(ur);
			for (int c = 0; c < W; ++c) {
				const std::size_t i = dem.index(r, c);
				const double qw = qx_at(r, c), qe = qx_at(r, c + 1);
				const double qn = qy_at(r, c), qs = qy_at(r + 1, c);
				const double h = s.depth[i] + q_in * source_share[i] * dt / area +
				                 dt * ((qw - qe) + (qs - qn)) / dx;
				s.depth[i] = std::max(0.0, h);
				s.max_depth[i] = std::max(s.max_depth[i], s.depth[i]);
				s.throughflow[i] +=
				    0.5 * dt * dx * ((std::abs(qw) + std::abs(qe)) + (std::abs(qs) + std::abs(qn)));
			}
		});

		double outflow = 0.0;
		for (int r = 0; r < H; ++r)
			outflow += -qx_at(r, 0) + qx_at(r, W);
		for (int c = 0; c < W; ++c)
			outflow += qy_at(0, c) - qy_at(H, c);
		s.outflow_volume += outflow * dx * dt;
		s.inflow_volume += q_in * dt;
		s.t = reaches_target ? target : s.t + dt;

		for (std::size_t i = 0; i < s.depth.size(); ++i) {
			if (!std::isfinite(s.depth[i]))
				throw SimulationError("simulation became unstable at t=" + format_real(s.t) +
				                          " (non-finite depth)",
				                      s);
		}
		for (std::size_t i = 0; i < s.qx.size(); ++i)
			if (!std::isfinite(s.qx[i]))
				throw SimulationError("simulation became unstable at t=" + format_real(s.t) +
				                          " (non-finite discharge)",
				                      s);
		for (std::size_t i = 0; i < s.qy.size(); ++i)
			if (!std::isfinite(s.qy[i]))
				throw SimulationError("simulation became unstable at t=" + format_real(s.t) +
				                          " (non-finite discharge)",
				                      s);

		if (reaches_target) {
			snapshots.push_back(s);
			if (config.output_interval > 0.0)
				next_output += config.output_interval;
		}
	}
	return snapshots;
}

Grid velocity_field(const FlowState& state, double dry_depth)
{
	const Grid& h = state.depth;
	Grid speed = Grid::like(h, 0.0, kDefaultNoData);
	const auto w = static_cast<std::size_t>(h.width());
	for (int r = 0; r < h.height(); ++r)
		for (int c = 0; c < h.width(); ++c) {
			const double d = h(r, c);
			if (!(d > dry_depth))
				continue;
			const auto row = static_cast<std::size_t>(r), col = static_cast<std::size_t>(c);
			const double qx = 0.5 * (state.qx[row * (w + 1) + col] + state.qx[row * (w + 1) + col + 1]);
			const double qy = 0.5 * (state.qy[row * w + col] + state.qy[(row + 1) * w + col]);
			speed(r, c) = std::hypot(qx / d, qy / d);
		}
	return speed;
}

} // namespace floodrisk

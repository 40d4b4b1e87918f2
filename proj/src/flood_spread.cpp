#include "floodrisk/flood_spread.hpp"

#include "floodrisk/error.hpp"
#include "floodrisk/parallel.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace floodrisk {

double FloodSpreadConfig::effective_sigma() const
{
	return sigma > 0.0 ? sigma : (kernel_size - 1) / 6.0;
}

void FloodSpreadConfig::validate() const
{
	if (kernel_size < 1 || kernel_size % 2 == 0)
		throw DataError("kernel size must be an odd integer >= 1");
	if (!(rise > 0.0))
		throw DataError("rise must be positive");
	if (kernel_size > 1 && !(effective_sigma() > 0.0))
		throw DataError("sigma must be positive");
}

double spread_weight(int drow, int dcol, double sigma)
{
	return std::exp(-static_cast<double>(drow * drow + dcol * dcol) / (2.0 * sigma * sigma));
}

Grid flooding_flow_accumulation(const Grid& dem, const Grid& accum, const FloodSpreadConfig& config)
{
	config.validate();
	if (dem.geometry() != accum.geometry())
		throw DataError("dem and accumulation grids differ in dimensions or georeference");

	const int w = dem.width();
	const int h = dem.height();
	const int half = config.kernel_size / 2;
	const double sigma = config.effective_sigma();
	constexpr double kNone = -std::numeric_limits<double>::infinity();

	// Source strength per cell, -inf where the cell cannot act as a center.
	std::vector<double> source(dem.size(), kNone);
	for (std::size_t i = 0; i < dem.size(); ++i)
		if (!dem.is_nodata(i) && !accum.is_nodata(i))
			source[i] = accum[i];

	const std::size_t k = static_cast<std::size_t>(config.kernel_size);
	std::vector<double> weights(k * k, 1.0);
	if (half > 0)
		for (int dr = -half; dr <= half; ++dr)
			for (int dc = -half; dc <= half; ++dc)
				weights[static_cast<std::size_t>(dr + half) * k + static_cast<std::size_t>(dc + half)] =
				    spread_weight(dr, dc, sigma);

	// Sliding maximum of `source` across each row's column window. Bounds the
	// best possible contribution from a window row, so rows and cells that
	// cannot beat the running maximum are skipped. Weights never exceed 1,
	// so skipping never changes the result.
	std::vector<double> row_window_max(dem.size(), kNone);
	parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t urow) {
		const std::size_t base = urow * static_cast<std::size_t>(w);
		std::deque<int> dq;
		int next = 0;
		for (int col = 0; col < w; ++col) {
			for (; next < w && next <= col + half; ++next) {
				while (!dq.empty() && source[base + static_cast<std::size_t>(dq.back())] <=
				                          source[base + static_cast<std::size_t>(next)])
					dq.pop_back();
				dq.push_back(next);
			}
			while (dq.front() < col - half)
				dq.pop_front();
			row_window_max[base + static_cast<std::size_t>(col)] =
			    source[base + static_cast<std::size_t>(dq.front())];
		}
	});

	Grid out = Grid::like(dem, kDefaultNoData, kDefaultNoData);
	parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t urow) {
		const int row = static_cast<int>(urow);
		for (int col = 0; col < w; ++col) {
			const std::size_t p = dem.index(row, col);
			if (source[p] == kNone)
				continue;
			const double target_elev = dem[p];
			double best = source[p];

			const int r_lo = std::max(0, row - half), r_hi = std::min(h - 1, row + half);
			const int c_lo = std::max(0, col - half), c_hi = std::min(w - 1, col + half);
			for (int r = r_lo; r <= r_hi; ++r) {
				const std::size_t base = static_cast<std::size_t>(r) * static_cast<std::size_t>(w);
				if (best >= 0.0 && row_window_max[base + static_cast<std::size_t>(col)] <= best)
					continue;
				const std::size_t wbase = static_cast<std::size_t>(r - row + half) * k;
				for (int c = c_lo; c <= c_hi; ++c) {
					const std::size_t ci = base + static_cast<std::size_t>(c);
					const double a = source[ci];
					if (a == kNone || (best >= 0.0 && a <= best))
						continue;
					if (!(target_elev < dem[ci] + config.rise))
						continue;
					const double v = a * weights[wbase + static_cast<std::size_t>(c - col + half)];
					if (v > best)
						best = v;
				}
			}
			out[p] = best;
		}
	});
	return out;
}

} // namespace floodrisk

#pragma once

#include "floodrisk/raster.hpp"

namespace floodrisk {

/// Parameters of the flooding-flow-accumulation window. `sigma <= 0` means
/// "derive from the window": (kernel_size - 1) / 6 cells.
struct FloodSpreadConfig
{
	static constexpr int kDefaultKernelSize = 41;
	static constexpr double kDefaultRise = 0.10;

	int kernel_size = kDefaultKernelSize;
	double rise = kDefaultRise;
	double sigma = 0.0;

	double effective_sigma() const;
	void validate() const;
};

/// Gaussian weight of a center-to-target offset, 1 at the center.
double spread_weight(int drow, int dcol, double sigma);

/// Spreads each cell's accumulation over its kernel window onto cells whose
/// elevation is less than `rise` above it, weighting by a center-normalized
/// Gaussian and keeping the maximum contribution per target. Nodata in
/// either input is excluded both as source and as target.
Grid flooding_flow_accumulation(const Grid& dem, const Grid& accum, const FloodSpreadConfig& config);

} // namespace floodrisk

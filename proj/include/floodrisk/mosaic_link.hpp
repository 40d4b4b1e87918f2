#pragma once

#include "floodrisk/hydrology.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace floodrisk {

/// Where a coarse stream link first enters the fine grid.
struct BoundaryCrossing
{
	int link_id = 0;
	Point point;                ///< entry point on the fine grid's outline
	double coarse_accumulation = 0.0; ///< accumulation at the last vertex outside
};

/// Entry point of segment a->b into the rectangle [min_x,max_x] x [min_y,max_y]
/// when `a` lies outside it and the segment reaches it.
std::optional<Point> segment_entry_point(Point a, Point b, double min_x, double min_y, double max_x,
                                         double max_y);

/// First outside-to-inside crossing of each link whose accumulation at the
/// crossing is at least `min_accum`.
std::vector<BoundaryCrossing> find_boundary_crossings(const StreamNetwork& coarse_network,
                                                      const RasterGeometry& coarse_geometry,
                                                      const RasterGeometry& fine_geometry,
                                                      double min_accum);

/// Seeds the fine grid with upstream accumulation from a coarse network: one
/// seed per entering link, on the valid boundary-ring cell nearest the
/// crossing, rescaled to fine-cell units by (coarse_cell / fine_cell)^2.
std::vector<InletSeed> derive_inlet_seeds(const StreamNetwork& coarse_network,
                                          const RasterGeometry& coarse_geometry, const Grid& fine_grid,
                                          double min_accum);

/// `row col accumulation` text lines.
std::string format_seeds(const std::vector<InletSeed>& seeds);
std::vector<InletSeed> parse_seeds(std::string_view text);
void write_seeds(const std::vector<InletSeed>& seeds, const std::filesystem::path& path);
std::vector<InletSeed> read_seeds(const std::filesystem::path& path);

} // namespace floodrisk

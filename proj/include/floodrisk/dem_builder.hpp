#pragma once

#include "floodrisk/raster.hpp"

#include <filesystem>
#include <string_view>
#include <vector>

namespace floodrisk {

struct PointRecord
{
	double x = 0.0;
	double y = 0.0;
	double z = 0.0;
};

using PointCloud = std::vector<PointRecord>;

/// Axis-aligned survey extent; membership is half-open [min, max).
struct Extent
{
	double min_x = 0.0;
	double min_y = 0.0;
	double max_x = 0.0;
	double max_y = 0.0;

	/// Extent with its origin snapped down to a multiple of `resolution` that
	/// keeps every point inside when gridded at `resolution`.
	static Extent enclosing(const PointCloud& cloud, double resolution);
};

struct DemBuildConfig
{
	static constexpr double kDefaultFineResolution = 0.10;
	static constexpr int kDefaultAggregateFactor = 4;

	double fine_resolution = kDefaultFineResolution;
	int aggregate_factor = kDefaultAggregateFactor;
	Extent extent;
	double nodata = kDefaultNoData;
};

/// Plain-text cloud: one `x y z` triple per line, `#` comment lines ignored.
PointCloud parse_point_cloud(std::string_view text);
PointCloud read_point_cloud(const std::filesystem::path& path);

/// Minimum z of the points falling in each cell; empty cells are nodata.
Grid rasterize_points(const PointCloud& cloud, const DemBuildConfig& config);

/// Block minimum over factor x factor cells, ignoring nodata. Blocks are
/// anchored at the lower-left corner; partial blocks at the north and east
/// edges aggregate the cells that exist.
Grid aggregate_min(const Grid& grid, int factor);

/// Fills nodata cells: row interpolation between the nearest valid west/east
/// cells, then column interpolation, then the nearest valid cell.
Grid fill_nodata_linear(const Grid& grid);

/// rasterize -> aggregate -> fill.
Grid build_dem(const PointCloud& cloud, const DemBuildConfig& config);

} // namespace floodrisk

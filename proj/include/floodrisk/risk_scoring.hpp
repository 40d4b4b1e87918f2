#pragma once

#include "floodrisk/raster.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace floodrisk {

/// Cell-count danger threshold: flooding flow accumulation at or above it is
/// "unsafe". Corresponds to a 100 m x 100 m contributing area.
inline constexpr double kDangerThreshold = 3257.0;

/// Contributing area in m^2 expressed as a count of cells of `cell_size`.
double area_to_cell_count(double area_m2, double cell_size);

struct GeoglyphRegion
{
	std::string id;
	std::string name;
	std::vector<Point> polygon; ///< exterior ring; closing vertex optional
};

enum class ThresholdSource { CellCount, Area };

/// Danger threshold plus where it came from, kept alongside the reports.
struct DangerThreshold
{
	double cells = kDangerThreshold;
	ThresholdSource source = ThresholdSource::CellCount;

	static DangerThreshold from_area(double area_m2, double cell_size);
	std::string describe() const;
};

struct RiskReport
{
	std::string id;
	std::string name;
	double max_ffa = 0.0;
	double log10_max_ffa = 0.0;
	bool unsafe = false;
	std::size_t cells_evaluated = 0;
};

/// Cells whose centers lie inside the polygon (even-odd rule, centers on
/// the outline count as inside), row-major.
std::vector<CellIndex> rasterize_polygon(const GeoglyphRegion& region, const RasterGeometry& geometry);

/// One report per region, sorted by max_ffa descending (ties by id).
std::vector<RiskReport> score_geoglyphs(const Grid& ffa, const std::vector<GeoglyphRegion>& regions,
                                        double threshold = kDangerThreshold);

/// GeoJSON FeatureCollection of Polygons with `id` and `name` properties.
std::vector<GeoglyphRegion> parse_regions_geojson(std::string_view text);
std::vector<GeoglyphRegion> read_regions_geojson(const std::filesystem::path& path);

/// CSV: id,name,max_ffa,log10_max_ffa,unsafe,cells_evaluated
std::string format_report_csv(const std::vector<RiskReport>& reports);
/// TSV of name and log10_max_ffa, one row per region.
std::string format_report_tsv(const std::vector<RiskReport>& reports);

} // namespace floodrisk

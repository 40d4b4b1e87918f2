#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace floodrisk {

/// Sentinel used for grids the library creates (labels, accumulation, ...).
inline constexpr double kDefaultNoData = -9999.0;

/// Planar position in meters.
struct Point
{
	double x = 0.0;
	double y = 0.0;

	friend bool operator==(const Point&, const Point&) = default;
};

/// Lower-left corner and square cell size. Row 0 is the northernmost row.
struct GeoTransform
{
	double origin_x = 0.0;
	double origin_y = 0.0;
	double cell_size = 1.0;

	friend bool operator==(const GeoTransform&, const GeoTransform&) = default;
};

struct CellIndex
{
	int row = 0;
	int col = 0;

	friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// Dimensions plus georeference, without any cell values.
struct RasterGeometry
{
	int width = 0;
	int height = 0;
	GeoTransform transform;

	Point cell_center(int row, int col) const
	{
		return {transform.origin_x + (col + 0.5) * transform.cell_size,
		        transform.origin_y + (height - row - 0.5) * transform.cell_size};
	}
	double min_x() const { return transform.origin_x; }
	double min_y() const { return transform.origin_y; }
	double max_x() const { return transform.origin_x + width * transform.cell_size; }
	double max_y() const { return transform.origin_y + height * transform.cell_size; }

	friend bool operator==(const RasterGeometry&, const RasterGeometry&) = default;
};

/// Georeferenced raster of doubles stored row-major, with an exact-match
/// nodata sentinel.
class Grid
{
  public:
	Grid() = default;
	Grid(int width, int height, GeoTransform transform, double nodata = kDefaultNoData,
	     double fill = 0.0);

	/// New grid sharing this grid's geometry.
	static Grid like(const Grid& other, double fill, double nodata);

	int width() const { return width_; }
	int height() const { return height_; }
	std::size_t size() const { return values_.size(); }
	const GeoTransform& transform() const { return transform_; }
	RasterGeometry geometry() const { return {width_, height_, transform_}; }
	double nodata() const { return nodata_; }
	double cell_size() const { return transform_.cell_size; }

	std::size_t index(int row, int col) const
	{
		return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
		       static_cast<std::size_t>(col);
	}
	CellIndex cell(std::size_t i) const
	{
		return {static_cast<int>(i / static_cast<std::size_t>(width_)),
		        static_cast<int>(i % static_cast<std::size_t>(width_))};
	}
	bool contains(int row, int col) const
	{
		return row >= 0 && col >= 0 && row < height_ && col < width_;
	}

	double& operator()(int row, int col) { return values_[index(row, col)]; }
	double operator()(int row, int col) const { return values_[index(row, col)]; }
	double& operator[](std::size_t i) { return values_[i]; }
	double operator[](std::size_t i) const { return values_[i]; }

	bool is_nodata(std::size_t i) const { return values_[i] == nodata_; }
	bool is_nodata(int row, int col) const { return is_nodata(index(row, col)); }
	bool is_valid(int row, int col) const { return contains(row, col) && !is_nodata(row, col); }

	std::span<double> values() { return values_; }
	std::span<const double> values() const { return values_; }

	Point cell_center(int row, int col) const { return geometry().cell_center(row, col); }

	/// Number of cells not equal to nodata.
	std::size_t valid_count() const;

	friend bool operator==(const Grid&, const Grid&) = default;

  private:
	int width_ = 0;
	int height_ = 0;
	GeoTransform transform_;
	double nodata_ = kDefaultNoData;
	std::vector<double> values_;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

/// Reads an ESRI-style ASCII grid (six header lines, then nrows x ncols values).
Grid read_ascii_grid(const std::filesystem::path& path);
Grid parse_ascii_grid(std::string_view text);

void write_ascii_grid(const Grid& grid, const std::filesystem::path& path);
std::string format_ascii_grid(const Grid& grid);

struct Rgb
{
	unsigned char r = 0, g = 0, b = 0;
	friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Color of one cell under the danger color scale: a red ramp below
/// `threshold`, a blue-to-white ramp from `threshold` up to `grid_max`.
Rgb falsecolor(double value, double threshold, double grid_max);

/// False-color rendering of every cell, row-major, top row first.
std::vector<Rgb> falsecolor_pixels(const Grid& grid, double threshold);

/// Writes the false-color rendering as a binary P6 pixmap.
void render_falsecolor(const Grid& grid, double threshold, const std::filesystem::path& path);

} // namespace floodrisk

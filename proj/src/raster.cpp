#include "floodrisk/raster.hpp"

#include "floodrisk/error.hpp"
#include "floodrisk/parallel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace floodrisk {

namespace {

bool iequals(std::string_view a, std::string_view b)
{
	return a.size() == b.size() &&
	       std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
		       return std::tolower(static_cast<unsigned char>(x)) ==
		              std::tolower(static_cast<unsigned char>(y));
	       });
}

// Splits on ASCII whitespace without copying.
class Tokenizer
{
  public:
	explicit Tokenizer(std::string_view text) : text_(text) {}

	bool next(std::string_view& token)
	{
		while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
			++pos_;
		if (pos_ >= text_.size())
			return false;
		const std::size_t start = pos_;
		while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])))
			++pos_;
		token = text_.substr(start, pos_ - start);
		return true;
	}

  private:
	std::string_view text_;
	std::size_t pos_ = 0;
};

bool parse_real(std::string_view token, double& out)
{
	const char* first = token.data();
	const char* last = token.data() + token.size();
	if (first != last && *first == '+')
		++first;
	auto [ptr, ec] = std::from_chars(first, last, out);
	return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_int(std::string_view token, long long& out)
{
	auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
	return ec == std::errc() && ptr == token.data() + token.size();
}

} // namespace

Grid::Grid(int width, int height, GeoTransform transform, double nodata, double fill)
    : width_(width), height_(height), transform_(transform), nodata_(nodata)
{
	if (width < 1 || height < 1)
		throw DataError("grid dimensions must be at least 1x1");
	if (!(transform.cell_size > 0.0) || !std::isfinite(transform.cell_size) ||
	    !std::isfinite(transform.origin_x) || !std::isfinite(transform.origin_y))
		throw DataError("grid transform must be finite with a positive cell size");
	values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Grid Grid::like(const Grid& other, double fill, double nodata)
{
	return Grid(other.width_, other.height_, other.transform_, nodata, fill);
}

std::size_t Grid::valid_count() const
{
	return static_cast<std::size_t>(
	    std::count_if(values_.begin(), values_.end(), [&](double v) { return v != nodata_; }));
}

std::string format_real(double value)
{
	std::array<char, 64> buf{};
	auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
	if (ec != std::errc())
		throw Error("cannot format real value");
	return std::string(buf.data(), ptr);
}

Grid parse_ascii_grid(std::string_view text)
{
	static constexpr std::array<std::string_view, 6> kKeys = {
	    "ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "NODATA_value"};

	Tokenizer tok(text);
	std::array<std::string_view, 6> raw{};
	for (std::size_t k = 0; k < kKeys.size(); ++k) {
		std::string_view key;
		if (!tok.next(key) || !iequals(key, kKeys[k]))
			throw DataError("malformed header: expected '" + std::string(kKeys[k]) + "'");
		if (!tok.next(raw[k]))
			throw DataError("malformed header: missing value for '" + std::string(kKeys[k]) + "'");
	}

	long long ncols = 0, nrows = 0;
	if (!parse_int(raw[0], ncols) || !parse_int(raw[1], nrows) || ncols < 1 || nrows < 1 ||
	    ncols > std::numeric_limits<int>::max() || nrows > std::numeric_limits<int>::max())
		throw DataError("malformed header: ncols/nrows must be positive integers");
	GeoTransform transform;
	double nodata = 0.0;
	if (!parse_real(raw[2], transform.origin_x) || !parse_real(raw[3], transform.origin_y) ||
	    !parse_real(raw[4], transform.cell_size) || !parse_real(raw[5], nodata))
		throw DataError("malformed header: non-numeric georeference value");
	if (!(transform.cell_size > 0.0))
		throw DataError("malformed header: cellsize must be positive");

	Grid grid(static_cast<int>(ncols), static_cast<int>(nrows), transform, nodata);
	std::size_t count = 0;
	std::string_view token;
	while (tok.next(token)) {
		if (count >= grid.size())
			throw DataError("token count mismatch: more than ncols*nrows values");
		double v = 0.0;
		if (!parse_real(token, v))
			throw DataError("non-numeric token '" + std::string(token) + "'");
		grid[count++] = v;
	}
	if (count != grid.size())
		throw DataError("token count mismatch: expected " + std::to_string(grid.size()) +
		                " values, found " + std::to_string(count));
	return grid;
}

Grid read_ascii_grid(const std::filesystem::path& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw IoError("cannot open grid '" + path.string() + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	try {
		return parse_ascii_grid(ss.str());
	} catch (const DataError& e) {
		throw DataError(path.string() + ": " + e.what());
	}
}

std::string format_ascii_grid(const Grid& grid)
{
	const auto& t = grid.transform();
	std::string out;
	out.reserve(grid.size() * 8 + 128);
	out += "ncols " + std::to_string(grid.width()) + "\n";
	out += "nrows " + std::to_string(grid.height()) + "\n";
	out += "xllcorner " + format_real(t.origin_x) + "\n";
	out += "yllcorner " + format_real(t.origin_y) + "\n";
	out += "cellsize " + format_real(t.cell_size) + "\n";
	out += "NODATA_value " + format_real(grid.nodata()) + "\n";
	for (int r = 0; r < grid.height(); ++r) {
		for (int c = 0; c < grid.width(); ++c) {
			if (c)
				out += ' ';
			out += format_real(grid(r, c));
		}
		out += '\n';
	}
	return out;
}

void write_ascii_grid(const Grid& grid, const std::filesystem::path& path)
{
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw IoError("cannot write grid '" + path.string() + "'");
	const std::string text = format_ascii_grid(grid);
	out.write(text.data(), static_cast<std::streamsize>(text.size()));
	if (!out)
		throw IoError("failed writing grid '" + path.string() + "'");
}

Rgb falsecolor(double value, double threshold, double grid_max)
{
	auto channel = [](double f) {
		return static_cast<unsigned char>(std::lround(std::clamp(f, 0.0, 255.0)));
	};
	if (value < threshold) {
		const double t = std::clamp(value / threshold, 0.0, 1.0);
		return {channel(80.0 + 175.0 * t), 0, 0};
	}
	const double span = grid_max - threshold;
	const double t = span > 0.0 ? std::clamp((value - threshold) / span, 0.0, 1.0) : 0.0;
	const unsigned char w = channel(255.0 * t);
	return {w, w, 255};
}

std::vector<Rgb> falsecolor_pixels(const Grid& grid, double threshold)
{
	if (!(threshold > 0.0))
		throw DataError("render threshold must be positive");
	double grid_max = -std::numeric_limits<double>::infinity();
	for (std::size_t i = 0; i < grid.size(); ++i)
		if (!grid.is_nodata(i))
			grid_max = std::max(grid_max, grid[i]);

	std::vector<Rgb> pixels(grid.size());
	parallel_for(0, grid.size(), [&](std::size_t i) {
		if (!grid.is_nodata(i))
			pixels[i] = falsecolor(grid[i], threshold, grid_max);
	});
	return pixels;
}

void render_falsecolor(const Grid& grid, double threshold, const std::filesystem::path& path)
{
	const auto pixels = falsecolor_pixels(grid, threshold);
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw IoError("cannot write image '" + path.string() + "'");
	out << "P6\n" << grid.width() << ' ' << grid.height() << "\n255\n";
	for (const Rgb& p : pixels) {
		const char bytes[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
		out.write(bytes, 3);
	}
	if (!out)
		throw IoError("failed writing image '" + path.string() + "'");
}

} // namespace floodrisk

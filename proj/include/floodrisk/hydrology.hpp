#pragma once

#include "floodrisk/raster.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace floodrisk {

/// Increment applied per step when flooding onto flats, in meters.
inline constexpr double kFillEpsilon = 1e-5;

/// D8 drainage code. Neighbor order doubles as the tie-break order.
enum class FlowCode : std::uint8_t { E, SE, S, SW, W, NW, N, NE, Outlet, NoData };

inline constexpr int kD8Count = 8;
inline constexpr std::array<int, kD8Count> kD8RowOffset = {0, 1, 1, 1, 0, -1, -1, -1};
inline constexpr std::array<int, kD8Count> kD8ColOffset = {1, 1, 0, -1, -1, -1, 0, 1};

/// ESRI power-of-two code for each direction (E=1 ... NE=128); outlets are 0.
int esri_code(FlowCode code);

/// A valid cell on the grid edge or next to a nodata cell. Depression
/// filling floods inward from these, and only these may become outlets.
bool is_boundary_cell(const Grid& grid, int row, int col);

class FlowDirGrid
{
  public:
	FlowDirGrid() = default;
	explicit FlowDirGrid(RasterGeometry geometry);

	const RasterGeometry& geometry() const { return geometry_; }
	int width() const { return geometry_.width; }
	int height() const { return geometry_.height; }
	std::size_t size() const { return direction_.size(); }
	std::size_t index(int row, int col) const
	{
		return static_cast<std::size_t>(row) * static_cast<std::size_t>(width()) +
		       static_cast<std::size_t>(col);
	}

	FlowCode& direction(std::size_t i) { return direction_[i]; }
	FlowCode direction(std::size_t i) const { return direction_[i]; }
	FlowCode direction(int row, int col) const { return direction_[index(row, col)]; }
	double& steepness(std::size_t i) { return steepness_[i]; }
	double steepness(std::size_t i) const { return steepness_[i]; }

	/// Linear index of the receiving cell, or nullopt for outlets and nodata.
	/// Throws DataError if the code points off the grid.
	std::optional<std::size_t> downstream(std::size_t i) const;

	/// ESRI-coded direction raster (outlet 0, nodata -> kDefaultNoData).
	Grid code_grid() const;
	Grid steepness_grid() const;
	/// Inverse of code_grid(); steepness is unknown and left at zero.
	static FlowDirGrid from_code_grid(const Grid& codes);

	friend bool operator==(const FlowDirGrid&, const FlowDirGrid&) = default;

  private:
	RasterGeometry geometry_;
	std::vector<FlowCode> direction_;
	std::vector<double> steepness_;
};

/// Upstream contribution injected at a cell (e.g. area arriving from
/// outside the grid), in cell-count units.
struct InletSeed
{
	CellIndex cell;
	double accumulation = 0.0;

	friend bool operator==(const InletSeed&, const InletSeed&) = default;
};

/// Priority-flood depression filling. Each cell reached from a neighbor at
/// or above its own elevation is raised to that neighbor's level plus
/// `epsilon`, so every non-boundary cell ends with a strictly lower neighbor
/// when epsilon > 0. With epsilon == 0 the output is the plain spill surface.
Grid fill_depressions(const Grid& dem, double epsilon = kFillEpsilon);

/// Steepest-descent D8 directions on a filled DEM.
FlowDirGrid compute_flow_direction(const Grid& filled_dem);

/// Cell order in which every cell precedes its downstream receiver.
/// Throws DataError naming a cycle if the graph is not acyclic.
std::vector<std::size_t> topological_order(const FlowDirGrid& flowdir);

/// Self-inclusive contributing-cell count plus any seeded inflow.
Grid compute_flow_accumulation(const FlowDirGrid& flowdir, std::span<const InletSeed> seeds = {});

/// Outlets labelled 1..K in row-major order; every cell takes its outlet's label.
Grid label_watersheds(const FlowDirGrid& flowdir);

struct StreamLink
{
	int id = 0;
	std::vector<CellIndex> cells;     ///< downstream order, ends included
	std::vector<double> accumulation; ///< per cell of `cells`
	double head_accumulation = 0.0;
	double tail_accumulation = 0.0;
};

enum class NodeKind { Junction, Outlet };

struct StreamNode
{
	int id = 0;
	NodeKind kind = NodeKind::Junction;
	CellIndex cell;
	std::vector<int> incoming;
	std::optional<int> outgoing;
};

struct StreamNetwork
{
	RasterGeometry geometry;
	std::vector<StreamLink> links;
	std::vector<StreamNode> nodes;

	std::size_t junction_count() const;
};

/// Channel cells are those with accumulation >= channel_threshold. Links run
/// from a source or junction down to the next junction or outlet.
StreamNetwork vectorize_network(const Grid& accum, const FlowDirGrid& flowdir, double channel_threshold);

std::string network_to_json(const StreamNetwork& network);
StreamNetwork network_from_json(std::string_view text);
void write_network_json(const StreamNetwork& network, const std::filesystem::path& path);
StreamNetwork read_network_json(const std::filesystem::path& path);

} // namespace floodrisk

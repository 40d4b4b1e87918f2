#pragma once

#include "floodrisk/error.hpp"
#include "floodrisk/raster.hpp"

#include <utility>
#include <vector>

namespace floodrisk {

inline constexpr double kGravity = 9.81;

/// Discharge of the shipped highway/culvert example scenario, m^3/s.
inline constexpr double kExampleInflowDischarge = 20.0;

/// Inflow along a line segment. A single-entry hydrograph is a constant
/// discharge; otherwise discharge is interpolated linearly in time and held
/// at the end values outside the hydrograph.
struct InflowBoundary
{
	Point from;
	Point to;
	std::vector<std::pair<double, double>> hydrograph; ///< (t seconds, m^3/s)

	static InflowBoundary constant(Point from, Point to, double discharge);
	double discharge_at(double t) const;
	void validate() const;
};

struct SimConfig
{
	static constexpr double kDefaultManningN = 0.035;
	static constexpr double kDefaultCfl = 0.7;
	static constexpr double kDefaultDryDepth = 1e-4;
	static constexpr double kDefaultMaxDt = 10.0;

	double manning_n = kDefaultManningN;
	double duration = 0.0;
	double cfl = kDefaultCfl;
	double dry_depth = kDefaultDryDepth;
	double output_interval = 0.0; ///< <= 0 means only the initial and final states
	double max_dt = kDefaultMaxDt;

	void validate() const;
};

/// Solver state. qx lives on the (width + 1) x height vertical faces
/// (positive eastward), qy on the width x (height + 1) horizontal faces
/// (positive northward; face r is the north face of row r).
struct FlowState
{
	Grid depth;
	Grid qx;
	Grid qy;
	double t = 0.0;

	double inflow_volume = 0.0;  ///< cumulative, m^3
	double outflow_volume = 0.0; ///< cumulative through open edges, m^3
	Grid max_depth;              ///< running maximum depth per cell
	Grid throughflow;            ///< cumulative volume passing through each cell, m^3

	double stored_volume() const;
};

/// Raised when the solver state stops being finite; carries the last state.
class SimulationError : public Error
{
  public:
	SimulationError(const std::string& what, FlowState state) : Error(what), state_(std::move(state)) {}
	const FlowState& state() const { return state_; }

  private:
	FlowState state_;
};

struct CulvertEdit
{
	std::vector<Point> path;
	double width = 0.0;
	double invert_drop = 0.0;
};

/// Distance from `p` to the polyline.
double distance_to_polyline(Point p, const std::vector<Point>& path);

/// Cells whose centers lie within width/2 of the culvert path.
std::vector<CellIndex> culvert_cells(const Grid& dem, const CulvertEdit& edit);

/// Lowers the culvert corridor to (lowest corridor elevation - invert_drop).
Grid carve_culvert(const Grid& dem, const CulvertEdit& edit);

/// Cells receiving the inflow: those the segment crosses on the grid's
/// outer ring, or every crossed cell when none is on the ring.
std::vector<CellIndex> inflow_cells(const Grid& dem, const InflowBoundary& inflow);

/// Explicit local-inertial solver with semi-implicit Manning friction.
/// Returns the initial state, one snapshot per output interval and the
/// final state. Throws SimulationError if the state becomes non-finite.
std::vector<FlowState> simulate(const Grid& dem, const InflowBoundary& inflow, const SimConfig& config);

/// Cell-centered speed from face-averaged unit discharges; 0 where dry.
Grid velocity_field(const FlowState& state, double dry_depth);

} // namespace floodrisk

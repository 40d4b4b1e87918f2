#include "floodrisk/error.hpp"
#include "floodrisk/parallel.hpp"
#include "floodrisk/scenario.hpp"
#include "floodrisk/synthetic.hpp"
#include "floodrisk/unsteady_flow.hpp"

#include <doctest.h>

#include <cmath>

using namespace floodrisk;

TEST_CASE("hydrograph interpolation")
{
	InflowBoundary in{{0, 0}, {1, 0}, {{10.0, 2.0}, {20.0, 6.0}, {40.0, 0.0}}};
	CHECK_NOTHROW(in.validate());
	CHECK(in.discharge_at(0.0) == 2.0);
	CHECK(in.discharge_at(15.0) == 4.0);
	CHECK(in.discharge_at(30.0) == 3.0);
	CHECK(in.discharge_at(100.0) == 0.0);
	CHECK(InflowBoundary::constant({0, 0}, {1, 1}, 20.0).discharge_at(1e6) == 20.0);

	in.hydrograph = {{0.0, 1.0}, {0.0, 2.0}};
	CHECK_THROWS_AS(in.validate(), DataError);
	in.hydrograph = {{0.0, -1.0}};
	CHECK_THROWS_AS(in.validate(), DataError);
	in.hydrograph.clear();
	CHECK_THROWS_AS(in.validate(), DataError);
}

TEST_CASE("config validation")
{
	SimConfig cfg;
	CHECK_THROWS_AS(cfg.validate(), DataError); // duration unset
	cfg.duration = 10.0;
	CHECK_NOTHROW(cfg.validate());
	cfg.cfl = 1.5;
	CHECK_THROWS_AS(cfg.validate(), DataError);
	cfg.cfl = 0.7;
	cfg.manning_n = 0.0;
	CHECK_THROWS_AS(cfg.validate(), DataError);
}

TEST_CASE("culvert carving")
{
	Grid dem(10, 10, {0, 0, 1});
	for (int r = 0; r < 10; ++r)
		for (int c = 0; c < 10; ++c)
			dem(r, c) = 5.0 + r;
	const CulvertEdit edit{{{4.5, 9.5}, {4.5, 0.5}}, 1.0, 0.25};
	const auto cells = culvert_cells(dem, edit);
	CHECK(cells.size() == 10);
	for (const auto& c : cells)
		CHECK(c.col == 4);
	const Grid carved = carve_culvert(dem, edit);
	for (int r = 0; r < 10; ++r) {
		CHECK(carved(r, 4) == 4.75); // lowest corridor cell 5.0 minus 0.25
		CHECK(carved(r, 3) == dem(r, 3));
	}
	CHECK(distance_to_polyline({7.5, 3.0}, edit.path) == 3.0);

	CHECK_THROWS_AS(carve_culvert(dem, {{{4.5, 9.5}}, 0.5, 0.25}), DataError);   // narrower than a cell
	CHECK_THROWS_AS(carve_culvert(dem, {{{4.5, 9.5}}, 1.0, 0.0}), DataError);    // no drop
	CHECK_THROWS_AS(carve_culvert(dem, {{{50.0, 50.0}}, 1.0, 0.1}), DataError);  // off the grid
	CHECK_THROWS_AS(carve_culvert(dem, {{}, 1.0, 0.1}), DataError);
}

TEST_CASE("inflow cells prefer the outer ring")
{
	const Grid dem(8, 8, {0, 0, 1});
	const auto edge = inflow_cells(dem, InflowBoundary::constant({2.5, 7.9}, {5.5, 7.9}, 1.0));
	REQUIRE(edge.size() == 4);
	for (const auto& c : edge)
		CHECK(c.row == 0);
	// A segment crossing the interior and the ring keeps only ring cells.
	const auto mixed = inflow_cells(dem, InflowBoundary::constant({3.5, 8.0}, {3.5, 5.2}, 1.0));
	REQUIRE(mixed.size() == 1);
	CHECK(mixed[0] == CellIndex{0, 3});
	const auto inner = inflow_cells(dem, InflowBoundary::constant({3.2, 3.5}, {4.8, 3.5}, 1.0));
	CHECK(inner.size() == 2);
	CHECK(inflow_cells(dem, InflowBoundary::constant({20, 20}, {30, 30}, 1.0)).empty());
}

TEST_CASE("no inflow keeps the domain dry")
{
	const Grid dem = synthetic::inclined_plane(12, 6, 1.0, 0.01);
	SimConfig cfg;
	cfg.duration = 50.0;
	const auto snaps = simulate(dem, InflowBoundary::constant({0.5, 0.5}, {0.5, 5.5}, 0.0), cfg);
	REQUIRE(snaps.size() == 2);
	CHECK(snaps.back().t == 50.0);
	CHECK(snaps.back().stored_volume() == 0.0);
	CHECK(snaps.back().outflow_volume == 0.0);
}

TEST_CASE("snapshots fall on the output interval")
{
	auto fx = synthetic::embankment_fixture();
	fx.config.duration = 250.0;
	fx.config.output_interval = 100.0;
	const auto snaps = simulate(fx.dem, fx.inflow, fx.config);
	REQUIRE(snaps.size() == 4);
	CHECK(snaps[0].t == 0.0);
	CHECK(snaps[1].t == 100.0);
	CHECK(snaps[2].t == 200.0);
	CHECK(snaps[3].t == 250.0);
	for (const auto& s : snaps)
		for (std::size_t i = 0; i < s.depth.size(); ++i) {
			CHECK(s.depth[i] >= 0.0);
			CHECK(s.max_depth[i] >= s.depth[i]);
		}
	const Grid speed = velocity_field(snaps.back(), fx.config.dry_depth);
	for (std::size_t i = 0; i < speed.size(); ++i) {
		if (snaps.back().depth[i] <= fx.config.dry_depth)
			CHECK(speed[i] == 0.0);
		CHECK(std::isfinite(speed[i]));
	}
}

TEST_CASE("volume bookkeeping balances on an open slope")
{
	const auto fx = synthetic::embankment_fixture();
	const auto last = simulate(fx.dem, fx.inflow, fx.config).back();
	CHECK(last.inflow_volume == doctest::Approx(2.0 * 900.0).epsilon(1e-12));
	const double balance = last.inflow_volume - last.outflow_volume - last.stored_volume();
	CHECK(std::abs(balance) <= 1e-6 * last.inflow_volume);
	CHECK(last.outflow_volume > 0.0);
}

TEST_CASE("mirror-symmetric terrain gives a mirror-symmetric flood")
{
	Grid dem(21, 30, {0, 0, 1});
	for (int r = 0; r < 30; ++r)
		for (int c = 0; c < 21; ++c)
			dem(r, c) = 0.05 * (29 - r) + 0.02 * std::abs(c - 10) + (r == 15 && std::abs(c - 10) > 2 ? 0.5 : 0.0);
	SimConfig cfg;
	cfg.duration = 200.0;
	const auto last = simulate(dem, InflowBoundary::constant({8.5, 29.9}, {12.5, 29.9}, 0.5), cfg).back();
	for (int r = 0; r < 30; ++r)
		for (int c = 0; c < 21; ++c)
			CHECK(last.depth(r, c) == last.depth(r, 20 - c));
}

TEST_CASE("results do not depend on the thread count")
{
	const auto fx = synthetic::embankment_fixture();
	SimConfig cfg = fx.config;
	cfg.duration = 200.0;
	set_thread_count(1);
	const auto one = simulate(fx.dem, fx.inflow, cfg).back();
	set_thread_count(4);
	const auto four = simulate(fx.dem, fx.inflow, cfg).back();
	set_thread_count(0);
	CHECK(one.depth == four.depth);
	CHECK(one.qx == four.qx);
	CHECK(one.qy == four.qy);
	CHECK(one.outflow_volume == four.outflow_volume);
}

TEST_CASE("simulation input checks")
{
	Grid dem = synthetic::inclined_plane(5, 5, 1.0, 0.01);
	SimConfig cfg;
	cfg.duration = 10.0;
	CHECK_THROWS_AS(simulate(dem, InflowBoundary::constant({50, 50}, {60, 60}, 1.0), cfg), DataError);
	dem(2, 2) = dem.nodata();
	CHECK_THROWS_AS(simulate(dem, InflowBoundary::constant({0.5, 0.5}, {0.5, 4.5}, 1.0), cfg), DataError);
}

TEST_CASE("scenario files round trip")
{
	const auto fx = synthetic::embankment_fixture(20.0);
	Scenario sc{"terrain.asc", fx.inflow, fx.config, {fx.culvert}};
	const std::string text = format_scenario(sc);
	const Scenario back = parse_scenario(text, "/data/run");
	CHECK(back.dem == std::filesystem::path("/data/run/terrain.asc"));
	CHECK(back.inflow.hydrograph == sc.inflow.hydrograph);
	CHECK(back.inflow.from == sc.inflow.from);
	CHECK(back.config.duration == sc.config.duration);
	CHECK(back.config.manning_n == sc.config.manning_n);
	REQUIRE(back.culverts.size() == 1);
	CHECK(back.culverts[0].path == sc.culverts[0].path);
	CHECK(back.culverts[0].invert_drop == sc.culverts[0].invert_drop);

	CHECK_THROWS_AS(parse_scenario("{}"), DataError);
	CHECK_THROWS_AS(parse_scenario(R"({"dem":"a.asc","inflow":{"segment":[[0,0],[1,1]],"discharge":1}})"),
	                DataError); // no duration
	CHECK_THROWS_AS(parse_scenario(R"({"dem":"a.asc","inflow":{"segment":[[0,0]],"discharge":1},
	                                   "config":{"duration":5}})"),
	                DataError);
	const Scenario hydro = parse_scenario(R"({"dem":"a.asc","inflow":{"segment":[[0,0],[1,1]],
	    "hydrograph":[[0,0],[60,5],[120,0]]},"config":{"duration":5}})");
	CHECK(hydro.inflow.discharge_at(30.0) == 2.5);
	CHECK(hydro.config.cfl == SimConfig::kDefaultCfl);
}

#include "floodrisk/error.hpp"
#include "floodrisk/hydrology.hpp"

#include "oracles.hpp"
#include "temp_dir.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

using namespace floodrisk;

namespace {

Grid from_rows(const std::vector<std::vector<double>>& rows, double cell = 1.0)
{
	Grid g(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()), {0, 0, cell});
	for (int r = 0; r < g.height(); ++r)
		for (int c = 0; c < g.width(); ++c)
			g(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
	return g;
}

} // namespace

TEST_CASE("fill raises a single pit to its spill level plus epsilon")
{
	const Grid dem = from_rows({{5, 5, 5}, {5, 1, 5}, {5, 4, 5}});
	const Grid f = fill_depressions(dem, 0.01);
	CHECK(f(1, 1) == 4.0 + 0.01);
	CHECK(f(2, 1) == 4.0);
	CHECK(fill_depressions(dem, 0.0)(1, 1) == 4.0);
}

TEST_CASE("fill leaves a drained surface alone")
{
	const Grid dem = from_rows({{9, 8, 7}, {8, 7, 6}, {7, 6, 5}});
	CHECK(fill_depressions(dem) == dem);
}

TEST_CASE("cells next to nodata drain into the hole")
{
	// The center cell of a 5x5 is a hole; its ring would be a pit otherwise.
	Grid dem = from_rows({{9, 9, 9, 9, 9}, {9, 2, 2, 2, 9}, {9, 2, -9999, 2, 9}, {9, 2, 2, 2, 9}, {9, 9, 9, 9, 9}});
	CHECK(is_boundary_cell(dem, 1, 1));
	CHECK(!is_boundary_cell(dem, 2, 2));
	CHECK(fill_depressions(dem) == dem);
	const FlowDirGrid fd = compute_flow_direction(dem);
	CHECK(fd.direction(1, 1) == FlowCode::Outlet);
	CHECK(fd.direction(2, 2) == FlowCode::NoData);
}

TEST_CASE("fill matches the reference surfaces on random grids")
{
	std::mt19937_64 rng(101);
	for (int trial = 0; trial < 150; ++trial) {
		const Grid dem = oracle::random_dem(rng, 10, 0.15);
		CHECK(fill_depressions(dem, 0.0) == oracle::spill_surface(dem));
		CHECK(fill_depressions(dem, kFillEpsilon) == oracle::relaxed_fill(dem, kFillEpsilon));
		CHECK(fill_depressions(dem, 0.125) == oracle::relaxed_fill(dem, 0.125));
	}
}

TEST_CASE("filled surface properties")
{
	std::mt19937_64 rng(202);
	for (int trial = 0; trial < 100; ++trial) {
		const Grid dem = oracle::random_dem(rng, 14, 0.1);
		const Grid spill = oracle::spill_surface(dem);
		const Grid f = fill_depressions(dem);
		// Idempotent up to no further change, never below the input, never
		// far above the spill level.
		CHECK(fill_depressions(f) == f);
		for (std::size_t i = 0; i < dem.size(); ++i) {
			if (dem.is_nodata(i)) {
				CHECK(f.is_nodata(i));
				continue;
			}
			CHECK(f[i] >= dem[i]);
			CHECK(f[i] >= spill[i]);
			CHECK(f[i] <= spill[i] + static_cast<double>(dem.size()) * kFillEpsilon);
		}
	}
}

TEST_CASE("fill rejects an all-nodata grid and negative epsilon")
{
	Grid g(2, 2, {0, 0, 1}, -9999, -9999);
	CHECK_THROWS_AS(fill_depressions(g), DataError);
	CHECK_THROWS_AS(fill_depressions(from_rows({{1}}), -1.0), DataError);
}

TEST_CASE("flow direction picks the steepest drop with fixed tie order")
{
	SUBCASE("diagonal drop is scaled by its length")
	{
		// East drop 1 over 1, south-east drop 1.3 over sqrt(2): east wins.
		const Grid dem = from_rows({{5, 5, 5}, {5, 5, 4}, {5, 5, 3.7}});
		CHECK(compute_flow_direction(dem).direction(1, 1) == FlowCode::E);
	}
	SUBCASE("ties go to the earlier direction in E, SE, S, ... order")
	{
		const Grid dem = from_rows({{5, 5, 5}, {5, 5, 4}, {5, 4, 5}});
		CHECK(compute_flow_direction(dem).direction(1, 1) == FlowCode::E);
		const Grid dem2 = from_rows({{4, 5, 4}, {5, 5, 5}, {5, 5, 5}});
		CHECK(compute_flow_direction(dem2).direction(1, 1) == FlowCode::NW);
	}
	SUBCASE("edge cell with no lower neighbor is an outlet, interior pit is an error")
	{
		const Grid dem = from_rows({{1, 2, 3}, {2, 3, 4}, {3, 4, 5}});
		const FlowDirGrid fd = compute_flow_direction(dem);
		CHECK(fd.direction(0, 0) == FlowCode::Outlet);
		CHECK(fd.direction(2, 2) == FlowCode::NW);
		CHECK_THROWS_AS(compute_flow_direction(from_rows({{5, 5, 5}, {5, 1, 5}, {5, 5, 5}})), DataError);
	}
	SUBCASE("esri codes")
	{
		CHECK(esri_code(FlowCode::E) == 1);
		CHECK(esri_code(FlowCode::SE) == 2);
		CHECK(esri_code(FlowCode::S) == 4);
		CHECK(esri_code(FlowCode::SW) == 8);
		CHECK(esri_code(FlowCode::W) == 16);
		CHECK(esri_code(FlowCode::NW) == 32);
		CHECK(esri_code(FlowCode::N) == 64);
		CHECK(esri_code(FlowCode::NE) == 128);
		CHECK(esri_code(FlowCode::Outlet) == 0);
	}
}

TEST_CASE("flow direction, accumulation and watersheds match the walking references")
{
	std::mt19937_64 rng(303);
	for (int trial = 0; trial < 120; ++trial) {
		const Grid filled = fill_depressions(oracle::random_dem(rng, 12, 0.12));
		const FlowDirGrid fd = compute_flow_direction(filled);
		const auto ref = oracle::d8_codes(filled);
		REQUIRE(ref.has_value());
		const Grid codes = fd.code_grid();
		CHECK(codes == *ref);
		CHECK(FlowDirGrid::from_code_grid(codes).code_grid() == codes);
		CHECK(compute_flow_accumulation(fd) == oracle::accumulation_by_walking(codes));
		CHECK(label_watersheds(fd) == oracle::watersheds_by_walking(codes));
	}
}

TEST_CASE("seeded accumulation")
{
	const Grid dem = from_rows({{3, 2, 1}, {3, 2, 1}, {3, 2, 1}});
	const FlowDirGrid fd = compute_flow_direction(dem);
	const InletSeed seeds[] = {{{1, 0}, 10.0}, {{1, 0}, 5.0}};
	const Grid acc = compute_flow_accumulation(fd, seeds);
	CHECK(acc(1, 0) == 16.0);
	CHECK(acc(1, 1) == 17.0);
	CHECK(acc(1, 2) == 18.0);
	CHECK(acc(0, 2) == 3.0);
	const InletSeed outside[] = {{{5, 0}, 1.0}};
	CHECK_THROWS_AS(compute_flow_accumulation(fd, outside), DataError);
}

TEST_CASE("cycles are reported")
{
	Grid codes(2, 1, {0, 0, 1});
	codes(0, 0) = 1;  // east
	codes(0, 1) = 16; // west
	const FlowDirGrid fd = FlowDirGrid::from_code_grid(codes);
	try {
		topological_order(fd);
		FAIL("expected a cycle error");
	} catch (const DataError& e) {
		CHECK(std::string(e.what()).find("cycle") != std::string::npos);
	}
	Grid off(1, 1, {0, 0, 1});
	off(0, 0) = 1;
	CHECK_THROWS_AS(compute_flow_accumulation(FlowDirGrid::from_code_grid(off)), DataError);
	Grid bad(1, 1, {0, 0, 1});
	bad(0, 0) = 3;
	CHECK_THROWS_AS(FlowDirGrid::from_code_grid(bad), DataError);
}

TEST_CASE("stream network of a hand-built drainage")
{
	// Everything drains into the middle column, which runs south to an
	// outlet on the south edge. With threshold 1 every cell is a channel.
	const double codes_rows[5][3] = {{2, 4, 8}, {1, 4, 16}, {1, 4, 16}, {1, 4, 16}, {1, 0, 16}};
	Grid codes(3, 5, {0, 0, 1});
	for (int r = 0; r < 5; ++r)
		for (int c = 0; c < 3; ++c)
			codes(r, c) = codes_rows[r][c];
	const FlowDirGrid fd = FlowDirGrid::from_code_grid(codes);
	const Grid acc = compute_flow_accumulation(fd);
	CHECK(acc(1, 1) == 6.0);
	CHECK(acc(4, 1) == 15.0);

	const StreamNetwork net = vectorize_network(acc, fd, 1.0);
	REQUIRE(net.links.size() == 14);
	// Ids follow the row-major order of the start cells.
	CHECK(net.links[0].cells == std::vector<CellIndex>{{0, 0}, {1, 1}});
	CHECK(net.links[4].cells == std::vector<CellIndex>{{1, 1}, {2, 1}});
	CHECK(net.links[4].accumulation == std::vector<double>{6.0, 9.0});
	CHECK(net.links[10].cells == std::vector<CellIndex>{{3, 1}, {4, 1}});
	CHECK(net.links[13].cells == std::vector<CellIndex>{{4, 2}, {4, 1}});

	REQUIRE(net.nodes.size() == 4);
	CHECK(net.junction_count() == 3);
	CHECK(net.nodes[0].cell == CellIndex{1, 1});
	CHECK(net.nodes[0].kind == NodeKind::Junction);
	CHECK(net.nodes[0].incoming == std::vector<int>{0, 1, 2, 3, 5});
	CHECK(net.nodes[0].outgoing == 4);
	CHECK(net.nodes[3].cell == CellIndex{4, 1});
	CHECK(net.nodes[3].kind == NodeKind::Outlet);
	CHECK(net.nodes[3].incoming == std::vector<int>{10, 12, 13});
	CHECK(!net.nodes[3].outgoing);

	// A higher threshold keeps only the trunk: one link, one outlet.
	const StreamNetwork trunk = vectorize_network(acc, fd, 6.0);
	REQUIRE(trunk.links.size() == 1);
	CHECK(trunk.links[0].cells == std::vector<CellIndex>{{1, 1}, {2, 1}, {3, 1}, {4, 1}});
	CHECK(trunk.links[0].head_accumulation == 6.0);
	CHECK(trunk.links[0].tail_accumulation == 15.0);
	REQUIRE(trunk.nodes.size() == 1);
	CHECK(trunk.nodes[0].kind == NodeKind::Outlet);
}

TEST_CASE("stream network links start at sources and junctions")
{
	// A flat-bottomed comb: three columns drain south into an east-flowing
	// trunk along row 3, which leaves at the east edge.
	Grid dem(5, 5, {0, 0, 1});
	for (int r = 0; r < 5; ++r)
		for (int c = 0; c < 5; ++c)
			dem(r, c) = 50.0 - 2.0 * r - 0.5 * c;
	for (int c = 0; c < 5; ++c)
		dem(4, c) = 60.0; // south wall
	const Grid filled = fill_depressions(dem);
	const FlowDirGrid fd = compute_flow_direction(filled);
	const Grid acc = compute_flow_accumulation(fd);
	const StreamNetwork net = vectorize_network(acc, fd, 3.0);
	REQUIRE(!net.links.empty());
	std::size_t junctions = 0;
	for (const auto& node : net.nodes)
		if (node.kind == NodeKind::Junction) {
			++junctions;
			CHECK(node.incoming.size() >= 2);
			CHECK(node.outgoing.has_value());
		}
	CHECK(junctions == net.junction_count());

	// Every channel cell is an inner or head cell of exactly one link, except
	// the terminus, which only ends links.
	std::map<CellIndex, int> body, tail;
	for (const auto& link : net.links)
		for (std::size_t k = 0; k < link.cells.size(); ++k)
			++(k + 1 < link.cells.size() ? body : tail)[link.cells[k]];
	for (int r = 0; r < 5; ++r)
		for (int c = 0; c < 5; ++c) {
			if (acc(r, c) < 3.0)
				continue;
			const auto d = fd.downstream(fd.index(r, c));
			const bool terminus = !d || acc[*d] < 3.0;
			CHECK(body[{r, c}] == (terminus ? 0 : 1));
			if (terminus)
				CHECK(tail[{r, c}] >= 1);
		}
}

TEST_CASE("network JSON round trip")
{
	std::mt19937_64 rng(404);
	for (int trial = 0; trial < 20; ++trial) {
		const Grid filled = fill_depressions(oracle::random_dem(rng, 12, 0.05));
		const FlowDirGrid fd = compute_flow_direction(filled);
		const Grid acc = compute_flow_accumulation(fd);
		const StreamNetwork net = vectorize_network(acc, fd, 3.0);
		const std::string text = network_to_json(net);
		CHECK(network_to_json(network_from_json(text)) == text);
	}
	TempDir dir;
	const Grid filled = fill_depressions(from_rows({{3, 2, 1}, {3, 2, 1}}));
	const FlowDirGrid fd = compute_flow_direction(filled);
	const StreamNetwork net = vectorize_network(compute_flow_accumulation(fd), fd, 1.0);
	write_network_json(net, dir / "n.json");
	CHECK(network_to_json(read_network_json(dir / "n.json")) == network_to_json(net));
	CHECK_THROWS_AS(network_from_json("{\"links\": 3}"), DataError);
	CHECK_THROWS_AS(vectorize_network(compute_flow_accumulation(fd), fd, 0.5), DataError);
}

#include "floodrisk/error.hpp"
#include "floodrisk/mosaic_link.hpp"

#include "temp_dir.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace floodrisk;

namespace {

// 10 x 10 coarse cells of 10 m over [0, 100]^2.
const RasterGeometry kCoarse{10, 10, {0.0, 0.0, 10.0}};

StreamLink link_through(int id, std::vector<CellIndex> cells)
{
	StreamLink link;
	link.id = id;
	link.cells = std::move(cells);
	for (std::size_t k = 0; k < link.cells.size(); ++k)
		link.accumulation.push_back(static_cast<double>(k + 1));
	link.head_accumulation = link.accumulation.front();
	link.tail_accumulation = link.accumulation.back();
	return link;
}

// 20 x 20 fine cells of 1 m over [40, 60]^2.
Grid fine_grid() { return Grid(20, 20, {40.0, 40.0, 1.0}, -9999.0, 5.0); }

} // namespace

TEST_CASE("segment entry point")
{
	auto e = segment_entry_point({0, 5}, {10, 5}, 4, 0, 8, 10);
	REQUIRE(e);
	CHECK(e->x == 4.0);
	CHECK(e->y == 5.0);
	e = segment_entry_point({0, 0}, {10, 10}, 5, 2, 20, 20);
	REQUIRE(e);
	CHECK(e->x == 5.0);
	CHECK(e->y == 5.0);
	CHECK(!segment_entry_point({0, 0}, {1, 1}, 5, 5, 6, 6));
	CHECK(!segment_entry_point({0, 9}, {9, 9.5}, 5, 0, 10, 5));
}

TEST_CASE("a link entering from the west seeds the nearest west-edge cell")
{
	StreamNetwork net;
	net.geometry = kCoarse;
	std::vector<CellIndex> row5;
	for (int c = 0; c < 10; ++c)
		row5.push_back({5, c}); // centers at y = 45
	net.links.push_back(link_through(0, row5));

	const auto crossings = find_boundary_crossings(net, kCoarse, fine_grid().geometry(), 0.0);
	REQUIRE(crossings.size() == 1);
	CHECK(crossings[0].point.x == 40.0);
	CHECK(crossings[0].point.y == 45.0);
	CHECK(crossings[0].coarse_accumulation == 4.0); // at (5, 3), the last vertex outside

	const auto seeds = derive_inlet_seeds(net, kCoarse, fine_grid(), 0.0);
	REQUIRE(seeds.size() == 1);
	// y = 45 is equidistant from rows 14 and 15; the lower row index wins.
	CHECK(seeds[0].cell == CellIndex{14, 0});
	CHECK(seeds[0].accumulation == 400.0); // 4 coarse cells of 100 fine cells each

	SUBCASE("threshold on the crossing accumulation")
	{
		CHECK(derive_inlet_seeds(net, kCoarse, fine_grid(), 4.0).size() == 1);
		CHECK(derive_inlet_seeds(net, kCoarse, fine_grid(), 4.5).empty());
	}
	SUBCASE("nodata ring cells are skipped")
	{
		Grid fine = fine_grid();
		fine(14, 0) = fine.nodata();
		fine(15, 0) = fine.nodata();
		const auto s = derive_inlet_seeds(net, kCoarse, fine, 0.0);
		REQUIRE(s.size() == 1);
		CHECK(s[0].cell == CellIndex{13, 0});
	}
}

TEST_CASE("only the first entry of a link counts; links starting inside give none")
{
	StreamNetwork net;
	net.geometry = kCoarse;
	// In through the north, out the east, back in from the east.
	net.links.push_back(link_through(0, {{3, 5}, {4, 5}, {5, 5}, {5, 6}, {5, 7}, {5, 6}, {5, 5}}));
	net.links.push_back(link_through(1, {{5, 5}, {6, 5}, {7, 5}}));
	net.links.push_back(link_through(2, {{0, 0}, {0, 1}, {0, 2}}));
	const auto crossings = find_boundary_crossings(net, kCoarse, fine_grid().geometry(), 0.0);
	REQUIRE(crossings.size() == 1);
	CHECK(crossings[0].link_id == 0);
	CHECK(crossings[0].point.x == 55.0);
	CHECK(crossings[0].point.y == 60.0);
	CHECK(crossings[0].coarse_accumulation == 1.0);
}

TEST_CASE("seeds always land on valid outer-ring cells")
{
	std::mt19937_64 rng(17);
	std::uniform_int_distribution<int> cell(0, 9), step(-1, 1);
	const Grid fine = fine_grid();
	for (int trial = 0; trial < 200; ++trial) {
		std::vector<CellIndex> path{{cell(rng), cell(rng)}};
		for (int k = 0; k < 12; ++k) {
			CellIndex next{std::clamp(path.back().row + step(rng), 0, 9), std::clamp(path.back().col + step(rng), 0, 9)};
			if (next != path.back())
				path.push_back(next);
		}
		StreamNetwork net;
		net.geometry = kCoarse;
		net.links.push_back(link_through(0, path));
		const auto crossings = find_boundary_crossings(net, kCoarse, fine.geometry(), 0.0);
		const auto seeds = derive_inlet_seeds(net, kCoarse, fine, 0.0);
		REQUIRE(seeds.size() == crossings.size());
		CHECK(seeds.size() <= 1);
		for (std::size_t k = 0; k < seeds.size(); ++k) {
			const auto& s = seeds[k];
			CHECK((s.cell.row == 0 || s.cell.col == 0 || s.cell.row == 19 || s.cell.col == 19));
			CHECK(s.accumulation == crossings[k].coarse_accumulation * 100.0);
			const Point p = crossings[k].point;
			CHECK(p.x >= 40.0);
			CHECK(p.x <= 60.0);
			CHECK(p.y >= 40.0);
			CHECK(p.y <= 60.0);
			// The seed cell is within one cell of the crossing point.
			const Point c = fine.cell_center(s.cell.row, s.cell.col);
			CHECK(std::hypot(c.x - p.x, c.y - p.y) <= std::sqrt(0.5) + 1e-12);
		}
	}
}

TEST_CASE("grids that do not overlap are rejected")
{
	StreamNetwork net;
	net.geometry = kCoarse;
	const Grid far(5, 5, {5000.0, 5000.0, 1.0});
	CHECK_THROWS_AS(derive_inlet_seeds(net, kCoarse, far, 0.0), DataError);
}

TEST_CASE("seed files")
{
	const std::vector<InletSeed> seeds = {{{3, 0}, 400.0}, {{0, 7}, 12.5}};
	CHECK(format_seeds(seeds) == "3 0 400\n0 7 12.5\n");
	CHECK(parse_seeds(format_seeds(seeds)) == seeds);
	CHECK(parse_seeds("# comment\n\n1 2 3\n").size() == 1);
	CHECK_THROWS_AS(parse_seeds("1 2\n"), DataError);
	CHECK_THROWS_AS(parse_seeds("1 2 3 4\n"), DataError);
	CHECK_THROWS_AS(parse_seeds("1 x 3\n"), DataError);
	CHECK_THROWS_AS(parse_seeds("1 2 -3\n"), DataError);
	TempDir dir;
	write_seeds(seeds, dir / "s.txt");
	CHECK(read_seeds(dir / "s.txt") == seeds);
	CHECK_THROWS_AS(read_seeds(dir / "missing.txt"), IoError);
}

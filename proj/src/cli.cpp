#include "floodrisk/cli.hpp"

#include "floodrisk/dem_builder.hpp"
#include "floodrisk/error.hpp"
#include "floodrisk/flood_spread.hpp"
#include "floodrisk/hydrology.hpp"
#include "floodrisk/manifest.hpp"
#include "floodrisk/mosaic_link.hpp"
#include "floodrisk/parallel.hpp"
#include "floodrisk/risk_scoring.hpp"
#include "floodrisk/scenario.hpp"
#include "floodrisk/unsteady_flow.hpp"

#include <CLI11.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace floodrisk::cli {

namespace fs = std::filesystem;

namespace {

struct Options
{
	unsigned threads = 0;
	std::string manifest;

	// build-dem
	std::string points, extent, fine_out;
	double fine_res = DemBuildConfig::kDefaultFineResolution;
	int factor = DemBuildConfig::kDefaultAggregateFactor;
	double nodata = kDefaultNoData;

	std::string dem, out, flowdir, accum, seeds, steepness_out;
	double epsilon = kFillEpsilon;
	double channel_threshold = 0.0;

	// link-coarse
	std::string network, fine;
	double min_accum = 0.0;

	// flood-spread
	int kernel = FloodSpreadConfig::kDefaultKernelSize;
	double rise = FloodSpreadConfig::kDefaultRise;
	std::optional<double> sigma;

	// score / render
	std::string ffa, regions, tsv, grid;
	double threshold = kDangerThreshold;
	std::optional<double> threshold_area;

	// simulate
	std::string scenario, out_dir;

	// carve
	std::string path;
	double width = 0.0, invert_drop = 0.0;
};

using Handler = std::function<StepRecord(Options&, std::ostream&)>;

std::vector<Point> parse_path(const std::string& text)
{
	std::vector<Point> pts;
	std::stringstream ss(text);
	std::string pair;
	while (std::getline(ss, pair, ';')) {
		const auto comma = pair.find(',');
		if (comma == std::string::npos)
			throw DataError("path vertex '" + pair + "' is not 'x,y'");
		Point p;
		const std::string xs = pair.substr(0, comma), ys = pair.substr(comma + 1);
		auto [px, ex] = std::from_chars(xs.data(), xs.data() + xs.size(), p.x);
		auto [py, ey] = std::from_chars(ys.data(), ys.data() + ys.size(), p.y);
		if (ex != std::errc() || ey != std::errc() || px != xs.data() + xs.size() ||
		    py != ys.data() + ys.size())
			throw DataError("path vertex '" + pair + "' is not 'x,y'");
		pts.push_back(p);
	}
	return pts;
}

Extent parse_extent(const std::string& text)
{
	std::array<double, 4> v{};
	std::stringstream ss(text);
	std::string tok;
	std::size_t k = 0;
	while (std::getline(ss, tok, ',')) {
		if (k == 4)
			throw DataError("extent must be 'minx,miny,maxx,maxy'");
		auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v[k]);
		if (ec != std::errc() || p != tok.data() + tok.size())
			throw DataError("extent must be 'minx,miny,maxx,maxy'");
		++k;
	}
	if (k != 4)
		throw DataError("extent must be 'minx,miny,maxx,maxy'");
	return {v[0], v[1], v[2], v[3]};
}

void write_text(const fs::path& path, const std::string& text)
{
	std::ofstream f(path, std::ios::binary | std::ios::trunc);
	if (!f)
		throw IoError("cannot write '" + path.string() + "'");
	f << text;
}

// Shortest fixed-notation text, for file names.
std::string time_label(double t)
{
	std::array<char, 64> buf{};
	auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), t, std::chars_format::fixed);
	return std::string(buf.data(), p);
}

StepRecord cmd_build_dem(Options& o, std::ostream& out)
{
	const PointCloud cloud = read_point_cloud(o.points);
	DemBuildConfig cfg;
	cfg.fine_resolution = o.fine_res;
	cfg.aggregate_factor = o.factor;
	cfg.nodata = o.nodata;
	if (!(o.fine_res > 0.0))
		throw DataError("--fine-res must be positive");
	cfg.extent = o.extent.empty() ? Extent::enclosing(cloud, o.fine_res) : parse_extent(o.extent);

	const Grid fine_grid = rasterize_points(cloud, cfg);
	const Grid dem = fill_nodata_linear(aggregate_min(fine_grid, cfg.aggregate_factor));
	write_ascii_grid(dem, o.out);
	out << "build-dem: " << cloud.size() << " points -> " << dem.width() << "x" << dem.height()
	    << " DEM at " << format_real(dem.cell_size()) << " m\n";

	StepRecord rec{"build-dem", {{"points", o.points}}, {{"dem", o.out}}, {}};
	if (!o.fine_out.empty()) {
		write_ascii_grid(fine_grid, o.fine_out);
		rec.outputs.emplace_back("fine", o.fine_out);
	}
	return rec;
}

StepRecord cmd_fill(Options& o, std::ostream&)
{
	write_ascii_grid(fill_depressions(read_ascii_grid(o.dem), o.epsilon), o.out);
	return {"fill", {{"dem", o.dem}}, {{"filled", o.out}}, {}};
}

StepRecord cmd_flowdir(Options& o, std::ostream&)
{
	const FlowDirGrid fd = compute_flow_direction(read_ascii_grid(o.dem));
	write_ascii_grid(fd.code_grid(), o.out);
	StepRecord rec{"flowdir", {{"dem", o.dem}}, {{"flowdir", o.out}}, {}};
	if (!o.steepness_out.empty()) {
		write_ascii_grid(fd.steepness_grid(), o.steepness_out);
		rec.outputs.emplace_back("steepness", o.steepness_out);
	}
	return rec;
}

StepRecord cmd_flowacc(Options& o, std::ostream&)
{
	const FlowDirGrid fd = FlowDirGrid::from_code_grid(read_ascii_grid(o.flowdir));
	std::vector<InletSeed> seeds;
	StepRecord rec{"flowacc", {{"flowdir", o.flowdir}}, {{"accum", o.out}}, {}};
	if (!o.seeds.empty()) {
		seeds = read_seeds(o.seeds);
		rec.inputs.emplace_back("seeds", o.seeds);
	}
	write_ascii_grid(compute_flow_accumulation(fd, seeds), o.out);
	return rec;
}

StepRecord cmd_watershed(Options& o, std::ostream& out)
{
	const Grid labels = label_watersheds(FlowDirGrid::from_code_grid(read_ascii_grid(o.flowdir)));
	write_ascii_grid(labels, o.out);
	double max_label = 0.0;
	for (std::size_t i = 0; i < labels.size(); ++i)
		if (!labels.is_nodata(i))
			max_label = std::max(max_label, labels[i]);
	out << "watershed: " << format_real(max_label) << " watersheds\n";
	return {"watershed", {{"flowdir", o.flowdir}}, {{"labels", o.out}}, {}};
}

StepRecord cmd_vectorize(Options& o, std::ostream& out)
{
	const Grid acc = read_ascii_grid(o.accum);
	const FlowDirGrid fd = FlowDirGrid::from_code_grid(read_ascii_grid(o.flowdir));
	const StreamNetwork net = vectorize_network(acc, fd, o.channel_threshold);
	write_network_json(net, o.out);
	out << "vectorize: " << net.links.size() << " links, " << net.junction_count() << " junctions\n";
	return {"vectorize", {{"accum", o.accum}, {"flowdir", o.flowdir}}, {{"network", o.out}}, {}};
}

StepRecord cmd_link_coarse(Options& o, std::ostream& out)
{
	const StreamNetwork net = read_network_json(o.network);
	const Grid fine_grid = read_ascii_grid(o.fine);
	const auto seeds = derive_inlet_seeds(net, net.geometry, fine_grid, o.min_accum);
	write_seeds(seeds, o.out);
	out << "link-coarse: " << seeds.size() << " inlet seeds\n";
	return {"link-coarse", {{"network", o.network}, {"fine", o.fine}}, {{"seeds", o.out}}, {}};
}

StepRecord cmd_flood_spread(Options& o, std::ostream&)
{
	FloodSpreadConfig cfg;
	cfg.kernel_size = o.kernel;
	cfg.rise = o.rise;
	cfg.sigma = o.sigma.value_or(0.0);
	if (o.sigma && !(*o.sigma > 0.0))
		throw DataError("--sigma must be positive");
	write_ascii_grid(flooding_flow_accumulation(read_ascii_grid(o.dem), read_ascii_grid(o.accum), cfg), o.out);
	return {"flood-spread", {{"dem", o.dem}, {"accum", o.accum}}, {{"ffa", o.out}}, {}};
}

StepRecord cmd_score(Options& o, std::ostream& out)
{
	const Grid ffa = read_ascii_grid(o.ffa);
	const auto regions = read_regions_geojson(o.regions);
	const DangerThreshold threshold = o.threshold_area
	                                      ? DangerThreshold::from_area(*o.threshold_area, ffa.cell_size())
	                                      : DangerThreshold{o.threshold, ThresholdSource::CellCount};
	const auto reports = score_geoglyphs(ffa, regions, threshold.cells);
	write_text(o.out, format_report_csv(reports));

	std::size_t unsafe = 0;
	for (const auto& r : reports)
		unsafe += r.unsafe;
	out << "score: threshold " << threshold.describe() << "; " << unsafe << " of " << reports.size()
	    << " regions unsafe\n";

	StepRecord rec{"score", {{"ffa", o.ffa}, {"regions", o.regions}}, {{"report", o.out}}, {}};
	rec.params["effective_threshold"] = format_real(threshold.cells);
	rec.params["threshold_source"] = threshold.source == ThresholdSource::CellCount ? "cell-count" : "area";
	if (!o.tsv.empty()) {
		write_text(o.tsv, format_report_tsv(reports));
		rec.outputs.emplace_back("chart", o.tsv);
	}
	return rec;
}

StepRecord cmd_render(Options& o, std::ostream&)
{
	render_falsecolor(read_ascii_grid(o.grid), o.threshold, o.out);
	return {"render", {{"grid", o.grid}}, {{"image", o.out}}, {}};
}

StepRecord cmd_carve(Options& o, std::ostream&)
{
	const CulvertEdit edit{parse_path(o.path), o.width, o.invert_drop};
	write_ascii_grid(carve_culvert(read_ascii_grid(o.dem), edit), o.out);
	return {"carve", {{"dem", o.dem}}, {{"dem", o.out}}, {}};
}

StepRecord cmd_simulate(Options& o, std::ostream& out)
{
	const Scenario sc = read_scenario(o.scenario);
	Grid dem = read_ascii_grid(sc.dem);
	for (const auto& edit : sc.culverts)
		dem = carve_culvert(dem, edit);

	const auto snapshots = simulate(dem, sc.inflow, sc.config);
	fs::create_directories(o.out_dir);
	StepRecord rec{"simulate", {{"scenario", o.scenario}, {"dem", sc.dem}}, {}, {}};
	for (const auto& s : snapshots) {
		const std::string label = time_label(s.t);
		const fs::path depth = fs::path(o.out_dir) / ("depth_" + label + ".asc");
		const fs::path speed = fs::path(o.out_dir) / ("speed_" + label + ".asc");
		write_ascii_grid(s.depth, depth);
		write_ascii_grid(velocity_field(s, sc.config.dry_depth), speed);
		rec.outputs.emplace_back("depth_" + label, depth);
		rec.outputs.emplace_back("speed_" + label, speed);
	}
	const FlowState& last = snapshots.back();
	const fs::path max_depth = fs::path(o.out_dir) / "max_depth.asc";
	write_ascii_grid(last.max_depth, max_depth);
	rec.outputs.emplace_back("max_depth", max_depth);

	const double stored = last.stored_volume();
	out << "simulate: t=" << format_real(last.t) << " s, inflow " << format_real(last.inflow_volume)
	    << " m3, outflow " << format_real(last.outflow_volume) << " m3, stored " << format_real(stored)
	    << " m3\n";
	return rec;
}

struct Command
{
	const char* name;
	const char* help;
	Handler handler;
};

// Builds the CLI11 application and returns the subcommand -> handler table.
std::vector<std::pair<CLI::App*, Handler>> build(CLI::App& app, Options& o)
{
	app.require_subcommand(1);
	app.fallthrough();
	app.add_option("--threads", o.threads, "Worker threads (0 = all cores); results do not depend on it")
	    ->capture_default_str();
	app.add_option("--manifest", o.manifest, "Append a JSON-lines step record to this file");

	std::vector<std::pair<CLI::App*, Handler>> table;
	auto sub = [&](const char* name, const char* help, Handler h) {
		CLI::App* s = app.add_subcommand(name, help);
		table.emplace_back(s, std::move(h));
		return s;
	};

	auto* s = sub("build-dem", "Grid a LiDAR point cloud, min-aggregate it and fill holes", cmd_build_dem);
	s->add_option("--points", o.points, "Text point cloud, one 'x y z' per line")->required();
	s->add_option("--fine-res", o.fine_res, "Rasterization resolution in meters")->capture_default_str();
	s->add_option("--factor", o.factor, "Minimum-aggregation factor")->capture_default_str();
	s->add_option("--extent", o.extent, "minx,miny,maxx,maxy (default: point bounding box)");
	s->add_option("--nodata", o.nodata, "Nodata sentinel")->capture_default_str();
	s->add_option("--fine-out", o.fine_out, "Also write the fine-resolution raster");
	s->add_option("--out", o.out, "Output DEM (ASCII grid)")->required();

	s = sub("fill", "Fill depressions (priority flood with epsilon gradient)", cmd_fill);
	s->add_option("--dem", o.dem)->required();
	s->add_option("--epsilon", o.epsilon, "Rise per step across flats, meters")->capture_default_str();
	s->add_option("--out", o.out)->required();

	s = sub("flowdir", "D8 flow direction (ESRI codes) and steepness", cmd_flowdir);
	s->add_option("--dem", o.dem, "Depression-filled DEM")->required();
	s->add_option("--steepness-out", o.steepness_out);
	s->add_option("--out", o.out)->required();

	s = sub("flowacc", "Flow accumulation (self-inclusive cell counts)", cmd_flowacc);
	s->add_option("--flowdir", o.flowdir)->required();
	s->add_option("--seeds", o.seeds, "Inlet seeds, 'row col accumulation' per line");
	s->add_option("--out", o.out)->required();

	s = sub("watershed", "Label the watershed of every outlet", cmd_watershed);
	s->add_option("--flowdir", o.flowdir)->required();
	s->add_option("--out", o.out)->required();

	s = sub("vectorize", "Extract the stream network as JSON", cmd_vectorize);
	s->add_option("--accum", o.accum)->required();
	s->add_option("--flowdir", o.flowdir)->required();
	s->add_option("--threshold", o.channel_threshold, "Minimum accumulation of a channel cell")->required();
	s->add_option("--out", o.out)->required();

	s = sub("link-coarse", "Derive inlet seeds from a coarse stream network", cmd_link_coarse);
	s->add_option("--network", o.network, "Coarse network JSON from 'vectorize'")->required();
	s->add_option("--fine", o.fine, "Fine DEM receiving the seeds")->required();
	s->add_option("--min-accum", o.min_accum, "Ignore crossings below this coarse accumulation")
	    ->capture_default_str();
	s->add_option("--out", o.out)->required();

	s = sub("flood-spread", "Flooding flow accumulation", cmd_flood_spread);
	s->add_option("--dem", o.dem)->required();
	s->add_option("--accum", o.accum)->required();
	s->add_option("--kernel", o.kernel, "Odd window size in cells")->capture_default_str();
	s->add_option("--rise", o.rise, "Water rise above the source cell, meters")->capture_default_str();
	s->add_option("--sigma", o.sigma, "Gaussian sigma in cells (default (kernel-1)/6)");
	s->add_option("--out", o.out)->required();

	s = sub("score", "Score geoglyph polygons against a flooding flow accumulation layer", cmd_score);
	s->add_option("--ffa", o.ffa)->required();
	s->add_option("--regions", o.regions, "GeoJSON FeatureCollection of Polygons")->required();
	auto* thr = s->add_option("--threshold", o.threshold, "Danger threshold in cells")->capture_default_str();
	s->add_option("--threshold-area-m2", o.threshold_area, "Danger threshold as an area in m^2")->excludes(thr);
	s->add_option("--tsv", o.tsv, "Also write name/log10 TSV for charting");
	s->add_option("--out", o.out, "CSV report")->required();

	s = sub("simulate", "2D unsteady flow over a DEM", cmd_simulate);
	s->add_option("--scenario", o.scenario, "Scenario JSON")->required();
	s->add_option("--out-dir", o.out_dir)->required();

	s = sub("carve", "Lower a culvert corridor into a DEM", cmd_carve);
	s->add_option("--dem", o.dem)->required();
	s->add_option("--path", o.path, "Polyline 'x1,y1;x2,y2;...'")->required();
	s->add_option("--width", o.width, "Corridor width, meters")->required();
	s->add_option("--invert-drop", o.invert_drop, "Depth below the corridor minimum, meters")->required();
	s->add_option("--out", o.out)->required();

	s = sub("render", "False-color PPM of a grid around a danger threshold", cmd_render);
	s->add_option("--grid", o.grid)->required();
	s->add_option("--threshold", o.threshold)->capture_default_str();
	s->add_option("--out", o.out, "P6 image")->required();

	return table;
}

std::map<std::string, std::string> collect_params(const CLI::App& sub)
{
	std::map<std::string, std::string> params;
	for (const CLI::Option* opt : sub.get_options()) {
		if (opt->get_single_name() == "help")
			continue;
		std::string value;
		if (opt->count() > 0) {
			for (const auto& r : opt->results())
				value += (value.empty() ? "" : " ") + r;
		} else {
			value = opt->get_default_str();
		}
		if (!value.empty())
			params[opt->get_single_name()] = value;
	}
	return params;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
	CLI::App app{"Raster hydrology and flash-flood risk toolkit", "floodrisk"};
	Options o;
	const auto table = build(app, o);

	std::vector<std::string> rev(args.rbegin(), args.rend());
	if (!rev.empty())
		rev.pop_back(); // program name
	try {
		app.parse(rev);
	} catch (const CLI::CallForHelp&) {
		out << app.help();
		return kExitOk;
	} catch (const CLI::CallForAllHelp&) {
		out << app.help("", CLI::AppFormatMode::All);
		return kExitOk;
	} catch (const CLI::ParseError& e) {
		err << "floodrisk: " << e.what() << "\n\n" << app.help();
		return kExitUsage;
	}

	set_thread_count(o.threads);
	for (const auto& [sub, handler] : table) {
		if (!sub->parsed())
			continue;
		try {
			StepRecord rec = handler(o, out);
			if (!o.manifest.empty()) {
				auto params = collect_params(*sub);
				params.merge(rec.params);
				rec.params = std::move(params);
				append_step_record(o.manifest, rec);
			}
			return kExitOk;
		} catch (const std::exception& e) {
			err << "floodrisk " << sub->get_name() << ": " << e.what() << "\n";
			return kExitData;
		}
	}
	err << app.help();
	return kExitUsage;
}

std::string flag_default(const std::string& subcommand, const std::string& flag)
{
	CLI::App app;
	Options o;
	build(app, o);
	return app.get_subcommand(subcommand)->get_option(flag)->get_default_str();
}

std::vector<std::string> subcommands()
{
	CLI::App app;
	Options o;
	build(app, o);
	std::vector<std::string> names;
	for (const CLI::App* s : app.get_subcommands({}))
		names.push_back(s->get_name());
	return names;
}

} // namespace floodrisk::cli

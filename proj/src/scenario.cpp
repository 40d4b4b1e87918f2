#include "floodrisk/scenario.hpp"

#include "floodrisk/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace floodrisk {

using nlohmann::json;

namespace {

Point point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

} // namespace

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir)
{
	try {
		const json doc = json::parse(text);
		Scenario sc;
		sc.dem = doc.at("dem").get<std::string>();
		if (sc.dem.is_relative() && !base_dir.empty())
			sc.dem = base_dir / sc.dem;

		const auto& in = doc.at("inflow");
		const auto& seg = in.at("segment");
		if (seg.size() != 2)
			throw DataError("inflow segment needs exactly two points");
		sc.inflow.from = point_from(seg.at(0));
		sc.inflow.to = point_from(seg.at(1));
		if (in.contains("hydrograph")) {
			for (const auto& e : in.at("hydrograph"))
				sc.inflow.hydrograph.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
		} else {
			sc.inflow.hydrograph = {{0.0, in.at("discharge").get<double>()}};
		}
		sc.inflow.validate();

		const json cfg = doc.value("config", json::object());
		sc.config.manning_n = cfg.value("manning_n", SimConfig::kDefaultManningN);
		sc.config.duration = cfg.at("duration").get<double>();
		sc.config.cfl = cfg.value("cfl", SimConfig::kDefaultCfl);
		sc.config.dry_depth = cfg.value("dry_depth", SimConfig::kDefaultDryDepth);
		sc.config.output_interval = cfg.value("output_interval", 0.0);
		sc.config.max_dt = cfg.value("max_dt", SimConfig::kDefaultMaxDt);
		sc.config.validate();

		for (const auto& jc : doc.value("culverts", json::array())) {
			CulvertEdit edit;
			for (const auto& p : jc.at("path"))
				edit.path.push_back(point_from(p));
			edit.width = jc.at("width").get<double>();
			edit.invert_drop = jc.at("invert_drop").get<double>();
			sc.culverts.push_back(std::move(edit));
		}
		return sc;
	} catch (const json::exception& e) {
		throw DataError(std::string("malformed scenario: ") + e.what());
	}
}

Scenario read_scenario(const std::filesystem::path& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw IoError("cannot open scenario '" + path.string() + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return parse_scenario(ss.str(), path.parent_path());
}

std::string format_scenario(const Scenario& sc)
{
	using nlohmann::ordered_json;
	auto point = [](Point p) { return ordered_json::array({p.x, p.y}); };

	ordered_json inflow;
	inflow["segment"] = ordered_json::array({point(sc.inflow.from), point(sc.inflow.to)});
	if (sc.inflow.hydrograph.size() == 1) {
		inflow["discharge"] = sc.inflow.hydrograph.front().second;
	} else {
		inflow["hydrograph"] = ordered_json::array();
		for (const auto& [t, q] : sc.inflow.hydrograph)
			inflow["hydrograph"].push_back({t, q});
	}

	ordered_json doc;
	doc["dem"] = sc.dem.generic_string();
	doc["inflow"] = inflow;
	doc["config"] = {{"manning_n", sc.config.manning_n},     {"duration", sc.config.duration},
	                 {"cfl", sc.config.cfl},                 {"dry_depth", sc.config.dry_depth},
	                 {"output_interval", sc.config.output_interval}, {"max_dt", sc.config.max_dt}};
	if (!sc.culverts.empty()) {
		doc["culverts"] = ordered_json::array();
		for (const auto& c : sc.culverts) {
			ordered_json path = ordered_json::array();
			for (const auto& p : c.path)
				path.push_back(point(p));
			doc["culverts"].push_back({{"path", path}, {"width", c.width}, {"invert_drop", c.invert_drop}});
		}
	}
	return doc.dump(2) + "\n";
}

} // namespace floodrisk

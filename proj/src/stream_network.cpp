#include "floodrisk/error.hpp"
#include "floodrisk/hydrology.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace floodrisk {

using nlohmann::json;

std::size_t StreamNetwork::junction_count() const
{
	std::size_t n = 0;
	for (const auto& node : nodes)
		n += node.kind == NodeKind::Junction;
	return n;
}

StreamNetwork vectorize_network(const Grid& accum, const FlowDirGrid& flowdir, double channel_threshold)
{
	if (!(channel_threshold >= 1.0))
		throw DataError("channel threshold must be >= 1");
	if (accum.geometry() != flowdir.geometry())
		throw DataError("accumulation and flow direction grids differ in geometry");

	StreamNetwork net;
	net.geometry = flowdir.geometry();
	const std::size_t n = accum.size();

	std::vector<char> channel(n, 0);
	for (std::size_t i = 0; i < n; ++i)
		channel[i] = flowdir.direction(i) != FlowCode::NoData && !accum.is_nodata(i) &&
		             accum[i] >= channel_threshold;

	std::vector<int> channel_inflows(n, 0);
	for (std::size_t i = 0; i < n; ++i)
		if (channel[i])
			if (const auto d = flowdir.downstream(i); d && channel[*d])
				++channel_inflows[*d];

	// Links start at sources and junctions, in row-major order.
	std::map<std::size_t, int> node_at;
	for (std::size_t start = 0; start < n; ++start) {
		if (!channel[start] || channel_inflows[start] == 1)
			continue;
		if (channel_inflows[start] >= 2) {
			// A junction that is also the network terminus starts no link.
			const auto d = flowdir.downstream(start);
			if (!d || !channel[*d])
				continue;
		}
		StreamLink link;
		link.id = static_cast<int>(net.links.size());
		std::size_t cur = start;
		bool outlet_end = false;
		for (std::size_t steps = 0;; ++steps) {
			if (steps > n)
				throw DataError("flow direction cycle while tracing a stream link");
			link.cells.push_back(accum.cell(cur));
			link.accumulation.push_back(accum[cur]);
			const auto d = flowdir.downstream(cur);
			if (!d || !channel[*d]) {
				outlet_end = true;
				break;
			}
			cur = *d;
			if (channel_inflows[cur] >= 2) {
				link.cells.push_back(accum.cell(cur));
				link.accumulation.push_back(accum[cur]);
				// A confluence on the terminus is the outlet node.
				const auto after = flowdir.downstream(cur);
				outlet_end = !after || !channel[*after];
				break;
			}
		}
		link.head_accumulation = link.accumulation.front();
		link.tail_accumulation = link.accumulation.back();
		node_at.try_emplace(cur, outlet_end ? -2 : -1);
		net.links.push_back(std::move(link));
	}

	for (auto& [cell, kind_tag] : node_at) {
		StreamNode node;
		node.id = static_cast<int>(net.nodes.size());
		node.kind = kind_tag == -2 ? NodeKind::Outlet : NodeKind::Junction;
		node.cell = accum.cell(cell);
		kind_tag = node.id;
		net.nodes.push_back(std::move(node));
	}
	for (const auto& link : net.links) {
		const std::size_t tail = accum.index(link.cells.back().row, link.cells.back().col);
		net.nodes[static_cast<std::size_t>(node_at.at(tail))].incoming.push_back(link.id);
		const std::size_t head = accum.index(link.cells.front().row, link.cells.front().col);
		if (auto it = node_at.find(head); it != node_at.end())
			net.nodes[static_cast<std::size_t>(it->second)].outgoing = link.id;
	}
	return net;
}

namespace {

json cell_json(const CellIndex& c) { return json::array({c.row, c.col}); }

json point_json(const Point& p) { return json::array({p.x, p.y}); }

CellIndex cell_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

} // namespace

std::string network_to_json(const StreamNetwork& network)
{
	const auto& g = network.geometry;
	json doc;
	doc["grid"] = {{"ncols", g.width},
	               {"nrows", g.height},
	               {"xllcorner", g.transform.origin_x},
	               {"yllcorner", g.transform.origin_y},
	               {"cellsize", g.transform.cell_size}};
	json links = json::array();
	for (const auto& link : network.links) {
		json cells = json::array(), coords = json::array();
		for (const auto& c : link.cells) {
			cells.push_back(cell_json(c));
			coords.push_back(point_json(g.cell_center(c.row, c.col)));
		}
		links.push_back({{"id", link.id},
		                 {"cells", cells},
		                 {"coords", coords},
		                 {"accumulation", link.accumulation},
		                 {"head_accumulation", link.head_accumulation},
		                 {"tail_accumulation", link.tail_accumulation}});
	}
	json nodes = json::array();
	for (const auto& node : network.nodes) {
		nodes.push_back({{"id", node.id},
		                 {"kind", node.kind == NodeKind::Junction ? "junction" : "outlet"},
		                 {"cell", cell_json(node.cell)},
		                 {"coord", point_json(g.cell_center(node.cell.row, node.cell.col))},
		                 {"incoming", node.incoming},
		                 {"outgoing", node.outgoing ? json(*node.outgoing) : json(nullptr)}});
	}
	doc["links"] = std::move(links);
	doc["nodes"] = std::move(nodes);
	return doc.dump(1) + "\n";
}

StreamNetwork network_from_json(std::string_view text)
{
	try {
		const json doc = json::parse(text);
		StreamNetwork net;
		const auto& g = doc.at("grid");
		net.geometry.width = g.at("ncols").get<int>();
		net.geometry.height = g.at("nrows").get<int>();
		net.geometry.transform = {g.at("xllcorner").get<double>(), g.at("yllcorner").get<double>(),
		                          g.at("cellsize").get<double>()};
		for (const auto& jl : doc.at("links")) {
			StreamLink link;
			link.id = jl.at("id").get<int>();
			for (const auto& c : jl.at("cells"))
				link.cells.push_back(cell_from(c));
			link.accumulation = jl.at("accumulation").get<std::vector<double>>();
			link.head_accumulation = jl.at("head_accumulation").get<double>();
			link.tail_accumulation = jl.at("tail_accumulation").get<double>();
			if (link.cells.empty() || link.cells.size() != link.accumulation.size())
				throw DataError("stream link " + std::to_string(link.id) + " has inconsistent arrays");
			net.links.push_back(std::move(link));
		}
		for (const auto& jn : doc.at("nodes")) {
			StreamNode node;
			node.id = jn.at("id").get<int>();
			node.kind = jn.at("kind").get<std::string>() == "outlet" ? NodeKind::Outlet : NodeKind::Junction;
			node.cell = cell_from(jn.at("cell"));
			node.incoming = jn.at("incoming").get<std::vector<int>>();
			if (!jn.at("outgoing").is_null())
				node.outgoing = jn.at("outgoing").get<int>();
			net.nodes.push_back(std::move(node));
		}
		return net;
	} catch (const json::exception& e) {
		throw DataError(std::string("malformed stream network JSON: ") + e.what());
	}
}

void write_network_json(const StreamNetwork& network, const std::filesystem::path& path)
{
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw IoError("cannot write network '" + path.string() + "'");
	out << network_to_json(network);
	if (!out)
		throw IoError("failed writing network '" + path.string() + "'");
}

StreamNetwork read_network_json(const std::filesystem::path& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw IoError("cannot open network '" + path.string() + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return network_from_json(ss.str());
}

} // namespace floodrisk

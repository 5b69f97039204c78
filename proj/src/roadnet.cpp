#include "cityplan/roadnet.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "cityplan/errors.hpp"

namespace cityplan {

std::set<std::string> NetworkConfig::default_drivable_tags() {
    std::set<std::string> tags;
    for (const char* base : {"motorway", "trunk", "primary", "secondary", "tertiary"}) {
        tags.emplace(base);
        tags.emplace(std::string(base) + "_link");
    }
    tags.emplace("residential");
    tags.emplace("unclassified");
    tags.emplace("service");
    return tags;
}

RoadNetwork::RoadNetwork(double v0) : v0_(v0) {
    if (!(v0 > 0.0)) throw ContractError("v0 must be positive");
}

NodeIndex RoadNetwork::add_node(std::string id, Vec2 position) {
    if (!std::isfinite(position.x) || !std::isfinite(position.y))
        throw NetworkError("node '" + id + "' has a non-finite position");
    if (index_.contains(id)) throw NetworkError("duplicate node id '" + id + "'");
    const NodeIndex i = nodes_.size();
    index_.emplace(id, i);
    nodes_.push_back({std::move(id), position});
    adjacency_.emplace_back();
    return i;
}

EdgeIndex RoadNetwork::add_edge(NodeIndex source, NodeIndex target, double speed,
                                std::vector<Vec2> geometry, bool synthetic) {
    if (source >= nodes_.size() || target >= nodes_.size())
        throw NetworkError("edge endpoint out of range");
    if (!(speed > 0.0) || !std::isfinite(speed)) throw NetworkError("edge speed must be positive");
    if (geometry.empty()) geometry = {nodes_[source].position, nodes_[target].position};
    if (geometry.size() < 2 || geometry.front() != nodes_[source].position ||
        geometry.back() != nodes_[target].position)
        throw NetworkError("edge geometry must run from '" + nodes_[source].id + "' to '" +
                           nodes_[target].id + "'");
    RoadEdge e;
    e.source = source;
    e.target = target;
    e.length = polyline_length(geometry);
    if (!(e.length > 0.0))
        throw NetworkError("edge '" + nodes_[source].id + "' -> '" + nodes_[target].id +
                           "' has zero length");
    e.geometry = std::move(geometry);
    e.speed = speed;
    e.weight = e.length / speed;
    e.synthetic = synthetic;
    const EdgeIndex i = edges_.size();
    edges_.push_back(std::move(e));
    adjacency_[source].push_back(i);
    return i;
}

NodeIndex RoadNetwork::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) throw NetworkError("unknown node id '" + std::string(id) + "'");
    return it->second;
}

bool RoadNetwork::has_edge(NodeIndex source, NodeIndex target) const {
    for (EdgeIndex e : adjacency_.at(source))
        if (edges_[e].target == target) return true;
    return false;
}

namespace {

std::string json_id(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw ParseError("node ids must be strings or integers");
}

}  // namespace

NativeMap parse_native_map(std::string_view text, const NetworkConfig& cfg) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("fixture: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges"))
        throw ParseError("fixture: expected an object with 'nodes' and 'edges' arrays");

    NativeMap out{RoadNetwork(cfg.v0), std::nullopt};
    RoadNetwork& net = out.network;
    try {
        for (const auto& n : doc.at("nodes"))
            net.add_node(json_id(n.at("id")), {n.at("x").get<double>(), n.at("y").get<double>()});

        std::size_t k = 0;
        for (const auto& e : doc.at("edges")) {
            const std::string src = json_id(e.at("source"));
            const std::string dst = json_id(e.at("target"));
            NodeIndex s = 0, t = 0;
            try {
                s = net.index_of(src);
                t = net.index_of(dst);
            } catch (const NetworkError& err) {
                throw ParseError("fixture: edge " + std::to_string(k) + " (" + src + " -> " + dst +
                                 ") has a dangling reference: " + err.what());
            }
            std::vector<Vec2> geometry;
            if (e.contains("geometry"))
                for (const auto& p : e.at("geometry"))
                    geometry.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            net.add_edge(s, t, e.at("speed").get<double>(), std::move(geometry));
            ++k;
        }
        if (doc.contains("bounds")) {
            const auto& b = doc.at("bounds");
            out.bounds = Bounds{{b.at(0).get<double>(), b.at(1).get<double>()},
                                {b.at(2).get<double>(), b.at(3).get<double>()}};
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("fixture: ") + e.what());
    }
    return out;
}

RoadNetwork parse_native(std::string_view text, const NetworkConfig& cfg) {
    return parse_native_map(text, cfg).network;
}

std::vector<std::vector<NodeIndex>> strongly_connected_components(const RoadNetwork& net) {
    // Iterative Tarjan; recursion depth on long road chains can exceed the stack.
    const std::size_t n = net.node_count();
    constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, unvisited), lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<NodeIndex> stack;
    std::vector<std::vector<NodeIndex>> components;
    std::size_t counter = 0;

    struct Frame {
        NodeIndex node;
        std::size_t next_edge;
    };
    std::vector<Frame> call;

    for (NodeIndex root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        call.push_back({root, 0});
        index[root] = lowlink[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!call.empty()) {
            Frame& f = call.back();
            const auto out = net.out_edges(f.node);
            if (f.next_edge < out.size()) {
                const NodeIndex w = net.edge(out[f.next_edge++]).target;
                if (index[w] == unvisited) {
                    index[w] = lowlink[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[f.node] = std::min(lowlink[f.node], index[w]);
                }
                continue;
            }
            const NodeIndex v = f.node;
            call.pop_back();
            if (!call.empty()) lowlink[call.back().node] = std::min(lowlink[call.back().node], lowlink[v]);
            if (lowlink[v] == index[v]) {
                std::vector<NodeIndex> comp;
                NodeIndex w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                components.push_back(std::move(comp));
            }
        }
    }
    return components;
}

RoadNetwork ensure_strong_connectivity(RoadNetwork net) {
    if (net.node_count() == 0) throw NetworkError("cannot repair an empty network");
    const std::size_t original = net.edge_count();
    for (EdgeIndex i = 0; i < original; ++i) {
        const RoadEdge e = net.edge(i);
        if (net.has_edge(e.target, e.source)) continue;
        std::vector<Vec2> reversed(e.geometry.rbegin(), e.geometry.rend());
        net.add_edge(e.target, e.source, net.v0(), std::move(reversed), true);
    }
    auto comps = strongly_connected_components(net);
    if (comps.size() != 1) {
        std::vector<std::size_t> sizes;
        for (const auto& c : comps) sizes.push_back(c.size());
        std::sort(sizes.begin(), sizes.end());
        std::ostringstream msg;
        msg << "network is not strongly connected after repair; component sizes [";
        for (std::size_t i = 0; i < sizes.size(); ++i) msg << (i ? ", " : "") << sizes[i];
        msg << "]";
        throw NetworkError(msg.str());
    }
    return net;
}

std::vector<double> single_source_times(const RoadNetwork& net, NodeIndex source) {
    if (source >= net.node_count()) throw NetworkError("unknown source node");
    std::vector<double> dist(net.node_count(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, NodeIndex>;  // ties resolve to the lower node index
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[source] = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[u]) continue;
        for (EdgeIndex ei : net.out_edges(u)) {
            const RoadEdge& e = net.edge(ei);
            const double nd = d + e.weight;
            if (nd < dist[e.target]) {
                dist[e.target] = nd;
                queue.push({nd, e.target});
            }
        }
    }
    return dist;
}

std::vector<double> single_source_times(const RoadNetwork& net, std::string_view source_id) {
    return single_source_times(net, net.index_of(source_id));
}

TimeMatrix all_pairs_node_times(const RoadNetwork& net) {
    TimeMatrix m;
    m.size = net.node_count();
    m.data.reserve(m.size * m.size);
    for (NodeIndex s = 0; s < m.size; ++s) {
        auto row = single_source_times(net, s);
        m.data.insert(m.data.end(), row.begin(), row.end());
    }
    return m;
}

}  // namespace cityplan

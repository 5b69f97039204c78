#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cityplan/geometry.hpp"

namespace cityplan {

using NodeIndex = std::size_t;
using EdgeIndex = std::size_t;

inline constexpr double kmh_to_mps(double kmh) { return kmh * 1000.0 / 3600.0; }

struct RoadNode {
    std::string id;
    Vec2 position;
};

struct RoadEdge {
    NodeIndex source = 0;
    NodeIndex target = 0;
    std::vector<Vec2> geometry;
    double length = 0.0;  // m
    double speed = 0.0;   // m/s
    double weight = 0.0;  // s
    bool synthetic = false;
};

struct NetworkConfig {
    double v0 = kmh_to_mps(5.0);
    double default_speed = kmh_to_mps(40.0);
    std::set<std::string> drivable_tags = default_drivable_tags();

    static std::set<std::string> default_drivable_tags();
};

/// Directed road graph with travel-time weights. Nodes and edges keep their
/// insertion order, which doubles as their stable index.
class RoadNetwork {
public:
    explicit RoadNetwork(double v0 = kmh_to_mps(5.0));

    NodeIndex add_node(std::string id, Vec2 position);
    /// Adds an edge; empty geometry means a straight segment. Length comes
    /// from the geometry and weight = length / speed.
    EdgeIndex add_edge(NodeIndex source, NodeIndex target, double speed,
                       std::vector<Vec2> geometry = {}, bool synthetic = false);

    std::span<const RoadNode> nodes() const { return nodes_; }
    std::span<const RoadEdge> edges() const { return edges_; }
    const RoadNode& node(NodeIndex i) const { return nodes_.at(i); }
    const RoadEdge& edge(EdgeIndex i) const { return edges_.at(i); }
    std::span<const EdgeIndex> out_edges(NodeIndex n) const { return adjacency_.at(n); }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    double v0() const { return v0_; }

    /// Throws NetworkError for unknown ids.
    NodeIndex index_of(std::string_view id) const;
    bool has_edge(NodeIndex source, NodeIndex target) const;

private:
    double v0_;
    std::vector<RoadNode> nodes_;
    std::vector<RoadEdge> edges_;
    std::vector<std::vector<EdgeIndex>> adjacency_;
    std::unordered_map<std::string, NodeIndex> index_;
};

/// Axis-aligned extent in meters.
struct Bounds {
    Vec2 min;
    Vec2 max;
};

/// A fixture network plus the extent it declares for the land grid.
struct NativeMap {
    RoadNetwork network;
    std::optional<Bounds> bounds;
};

/// Reads the JSON fixture format:
///   {"nodes": [{"id", "x", "y"}...],
///    "edges": [{"source", "target", "speed", "geometry": [[x, y]...]}...],
///    "bounds": [xmin, ymin, xmax, ymax]}
/// Speeds are m/s, coordinates meters. `geometry` and `bounds` are optional.
NativeMap parse_native_map(std::string_view text, const NetworkConfig& cfg = {});
RoadNetwork parse_native(std::string_view text, const NetworkConfig& cfg = {});

/// Reads the OpenStreetMap XML subset (node, way/nd, highway/maxspeed/oneway tags).
RoadNetwork parse_osm_xml(std::string_view text, const NetworkConfig& cfg = {});

/// Parses an OSM maxspeed value to m/s; unknown formats fall back to `fallback`.
double parse_maxspeed(std::string_view value, double fallback);

/// Strongly connected components (Tarjan), each listed by node index.
std::vector<std::vector<NodeIndex>> strongly_connected_components(const RoadNetwork& net);

/// Adds the reverse of every one-way edge, travelled at v0, then verifies
/// the result is strongly connected.
RoadNetwork ensure_strong_connectivity(RoadNetwork net);

/// Dijkstra travel times in seconds from `source` to every node.
std::vector<double> single_source_times(const RoadNetwork& net, NodeIndex source);
std::vector<double> single_source_times(const RoadNetwork& net, std::string_view source_id);

/// Row-major |V| x |V| matrix of shortest travel times.
struct TimeMatrix {
    std::size_t size = 0;
    std::vector<double> data;
    double operator()(NodeIndex from, NodeIndex to) const { return data[from * size + to]; }
};
TimeMatrix all_pairs_node_times(const RoadNetwork& net);

}  // namespace cityplan

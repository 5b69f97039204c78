#pragma once
// Reference implementations used only by tests. They share no code with the
// library paths they check beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cityplan/accessibility.hpp"
#include "cityplan/landgrid.hpp"
#include "cityplan/roadnet.hpp"

namespace oracle {

using namespace cityplan;

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Bellman-Ford single-source times.
inline std::vector<double> bellman_ford(const RoadNetwork& net, NodeIndex source) {
    std::vector<double> d(net.node_count(), inf);
    d[source] = 0.0;
    for (std::size_t round = 0; round + 1 < net.node_count(); ++round) {
        bool changed = false;
        for (const RoadEdge& e : net.edges())
            if (d[e.source] + e.weight < d[e.target]) {
                d[e.target] = d[e.source] + e.weight;
                changed = true;
            }
        if (!changed) break;
    }
    return d;
}

/// Floyd-Warshall all-pairs times, row-major.
inline std::vector<double> floyd_warshall(const RoadNetwork& net) {
    const std::size_t n = net.node_count();
    std::vector<double> d(n * n, inf);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
    for (const RoadEdge& e : net.edges()) d[e.source * n + e.target] = std::min(d[e.source * n + e.target], e.weight);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i * n + k] + d[k * n + j] < d[i * n + j]) d[i * n + j] = d[i * n + k] + d[k * n + j];
    return d;
}

struct Nearest {
    EdgeIndex edge = 0;
    double distance = inf;
    double arc = 0.0;
};

/// O(|E| * segments) scan using vector-parameter projection, written
/// independently of the library's polyline code. Same 1e-9 m tie rule.
inline Nearest brute_force_nearest(const RoadNetwork& net, Vec2 p) {
    Nearest best;
    for (EdgeIndex ei = 0; ei < net.edge_count(); ++ei) {
        const RoadEdge& e = net.edge(ei);
        if (e.synthetic) continue;
        double walked = 0.0;
        for (std::size_t k = 0; k + 1 < e.geometry.size(); ++k) {
            const double ax = e.geometry[k].x, ay = e.geometry[k].y;
            const double bx = e.geometry[k + 1].x, by = e.geometry[k + 1].y;
            const double len = std::sqrt((bx - ax) * (bx - ax) + (by - ay) * (by - ay));
            double t = ((p.x - ax) * (bx - ax) + (p.y - ay) * (by - ay)) / (len * len);
            t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
            const double qx = ax + t * (bx - ax), qy = ay + t * (by - ay);
            const double d = std::sqrt((p.x - qx) * (p.x - qx) + (p.y - qy) * (p.y - qy));
            if (d < best.distance - 1e-9) best = {ei, d, walked + t * len};
            walked += len;
        }
    }
    return best;
}

/// Average travel time of every cell by direct pairwise summation over all
/// cells, with node times from Floyd-Warshall and cell attachment from the
/// brute-force scan above.
inline std::vector<double> naive_average_times(const RoadNetwork& net, const CellGrid& grid) {
    const std::size_t n = net.node_count();
    const auto dist = floyd_warshall(net);
    const double v0 = net.v0();
    std::vector<Nearest> near(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) near[i] = brute_force_nearest(net, grid.cell(i).center);

    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const RoadEdge& ei = net.edge(near[i].edge);
        double sum = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (i == j) continue;
            const RoadEdge& ej = net.edge(near[j].edge);
            if (near[i].edge == near[j].edge) {
                sum += near[i].distance / v0 + std::abs(near[i].arc - near[j].arc) / ei.speed + near[j].distance / v0;
            } else {
                sum += near[i].distance / v0 + (ei.length - near[i].arc) / ei.speed + dist[ei.target * n + ej.source] +
                       near[j].arc / ej.speed + near[j].distance / v0;
            }
        }
        out[i] = sum / static_cast<double>(grid.size());
    }
    return out;
}

/// Separating-axis test for a closed segment against a closed rectangle.
inline bool segment_touches_rect(Vec2 a, Vec2 b, const Rect& r) {
    if (std::max(a.x, b.x) < r.min.x || std::min(a.x, b.x) > r.max.x) return false;
    if (std::max(a.y, b.y) < r.min.y || std::min(a.y, b.y) > r.max.y) return false;
    // the segment's normal axis: corners must not all lie strictly on one side
    const double nx = -(b.y - a.y), ny = b.x - a.x;
    const Vec2 corners[4] = {r.min, {r.max.x, r.min.y}, r.max, {r.min.x, r.max.y}};
    bool pos = false, neg = false;
    for (Vec2 c : corners) {
        const double s = nx * (c.x - a.x) + ny * (c.y - a.y);
        if (s >= 0.0) pos = true;
        if (s <= 0.0) neg = true;
    }
    return pos && neg;
}

/// Random strongly connected network: a random one-way Hamiltonian cycle plus
/// extra random edges; speeds 5..20 m/s.
inline RoadNetwork random_network(std::mt19937_64& rng, std::size_t nodes, std::size_t extra_edges,
                                  double extent = 500.0) {
    std::uniform_real_distribution<double> coord(0.0, extent), speed(5.0, 20.0);
    RoadNetwork net;
    for (std::size_t i = 0; i < nodes; ++i) net.add_node("n" + std::to_string(i), {coord(rng), coord(rng)});
    std::vector<NodeIndex> perm(nodes);
    for (std::size_t i = 0; i < nodes; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < nodes; ++i) net.add_edge(perm[i], perm[(i + 1) % nodes], speed(rng));
    std::uniform_int_distribution<std::size_t> pick(0, nodes - 1);
    for (std::size_t k = 0; k < extra_edges; ++k) {
        const NodeIndex a = pick(rng), b = pick(rng);
        if (a != b) net.add_edge(a, b, speed(rng));
    }
    return net;
}

}  // namespace oracle

#include "cityplan/accessibility.hpp"

#include <algorithm>
#include <cmath>

#include "cityplan/errors.hpp"

namespace cityplan {

NodeTimes::NodeTimes(const RoadNetwork& net, const CellGrid& grid) : rows_(net.node_count()) {
    for (std::size_t e = 0; e < grid.partition().size(); ++e) {
        if (grid.partition()[e].empty()) continue;
        const NodeIndex t = net.edge(e).target;
        if (rows_[t].empty()) rows_[t] = single_source_times(net, t);
    }
}

double NodeTimes::operator()(NodeIndex from, NodeIndex to) const {
    if (!has_source(from)) throw ContractError("no shortest-path row for node " + std::to_string(from));
    return rows_[from][to];
}

double network_access_time(const Cell& cell, double v0) { return cell.d_network / v0; }

double pair_travel_time(std::size_t from, std::size_t to, const RoadNetwork& net, const CellGrid& grid,
                        const NodeTimes& times) {
    if (from == to) return 0.0;
    const Cell& ci = grid.cell(from);
    const Cell& cj = grid.cell(to);
    const double v0 = net.v0();
    const RoadEdge& ei = net.edge(ci.nearest_edge);
    if (ci.nearest_edge == cj.nearest_edge)
        return network_access_time(ci, v0) + std::abs(ci.arc_from_source - cj.arc_from_source) / ei.speed +
               network_access_time(cj, v0);
    const RoadEdge& ej = net.edge(cj.nearest_edge);
    return network_access_time(ci, v0) + (ei.length - ci.arc_from_source) / ei.speed +
           times(ei.target, ej.source) + cj.arc_from_source / ej.speed + network_access_time(cj, v0);
}

EdgeVicinityTime edge_vicinity_time(EdgeIndex e, const RoadNetwork& net, const CellGrid& grid) {
    EdgeVicinityTime out;
    const auto& block = grid.partition().at(e);
    const double speed = net.edge(e).speed;
    for (std::size_t i : block) {
        const Cell& c = grid.cell(i);
        out.time += c.arc_from_source / speed + network_access_time(c, net.v0());
    }
    out.count = block.size();
    return out;
}

Precomputation precompute(const RoadNetwork& net, const CellGrid& grid) {
    Precomputation pre;
    pre.node_times = NodeTimes(net, grid);
    pre.vicinity.reserve(grid.partition().size());
    for (EdgeIndex e = 0; e < grid.partition().size(); ++e) pre.vicinity.push_back(edge_vicinity_time(e, net, grid));
    return pre;
}

namespace {

// Time from the cell to its own edge's target node.
double exit_time(const Cell& c, const RoadNetwork& net) {
    const RoadEdge& e = net.edge(c.nearest_edge);
    return network_access_time(c, net.v0()) + (e.length - c.arc_from_source) / e.speed;
}

}  // namespace

double neighborhood_avg_time(std::size_t cell, EdgeIndex e, const RoadNetwork& net, const CellGrid& grid,
                             const Precomputation& pre) {
    const Cell& c = grid.cell(cell);
    if (e == c.nearest_edge) throw ContractError("neighborhood average requires a foreign edge");
    const EdgeVicinityTime& v = pre.vicinity.at(e);
    if (v.count == 0) throw ContractError("neighborhood of edge " + std::to_string(e) + " is empty");
    const NodeIndex exit = net.edge(c.nearest_edge).target;
    return exit_time(c, net) + pre.node_times(exit, net.edge(e).source) + v.time / static_cast<double>(v.count);
}

double average_travel_time(std::size_t cell, const RoadNetwork& net, const CellGrid& grid,
                           const Precomputation& pre) {
    const Cell& c = grid.cell(cell);
    double sum = 0.0;
    for (std::size_t other : grid.partition()[c.nearest_edge])
        sum += pair_travel_time(cell, other, net, grid, pre.node_times);

    const double leave = exit_time(c, net);
    const NodeIndex exit = net.edge(c.nearest_edge).target;
    for (EdgeIndex e = 0; e < pre.vicinity.size(); ++e) {
        const EdgeVicinityTime& v = pre.vicinity[e];
        if (e == c.nearest_edge || v.count == 0) continue;
        // |C_e| * T_{C^e}(c), expanded so T_e is not divided and re-multiplied
        sum += static_cast<double>(v.count) * (leave + pre.node_times(exit, net.edge(e).source)) + v.time;
    }
    return sum / static_cast<double>(grid.size());
}

double naive_average_travel_time(std::size_t cell, const RoadNetwork& net, const CellGrid& grid,
                                 const NodeTimes& times) {
    double sum = 0.0;
    for (std::size_t other = 0; other < grid.size(); ++other)
        sum += pair_travel_time(cell, other, net, grid, times);
    return sum / static_cast<double>(grid.size());
}

void normalize_field(AccessibilityField& field) {
    const std::size_t n = field.avg_time.size();
    field.raw.assign(n, 1.0);
    field.normalized.assign(n, 1.0);
    if (n <= 1) return;
    for (std::size_t i = 0; i < n; ++i)
        field.raw[i] = field.avg_time[i] > 0.0 ? 1.0 / field.avg_time[i] : 1.0;
    const auto [lo, hi] = std::minmax_element(field.raw.begin(), field.raw.end());
    const double min = *lo;
    const double max = *hi;
    if (max == min) return;
    for (std::size_t i = 0; i < n; ++i) field.normalized[i] = (field.raw[i] - min) / (max - min);
}

AccessibilityField compute_field(const RoadNetwork& net, const CellGrid& grid) {
    const Precomputation pre = precompute(net, grid);
    AccessibilityField field;
    field.avg_time.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) field.avg_time[i] = average_travel_time(i, net, grid, pre);
    normalize_field(field);
    return field;
}

AccessibilityField compute_field_naive(const RoadNetwork& net, const CellGrid& grid) {
    const NodeTimes times(net, grid);
    AccessibilityField field;
    field.avg_time.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) field.avg_time[i] = naive_average_travel_time(i, net, grid, times);
    normalize_field(field);
    return field;
}

}  // namespace cityplan

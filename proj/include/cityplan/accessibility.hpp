#pragma once

#include <cstddef>
#include <vector>

#include "cityplan/landgrid.hpp"
#include "cityplan/roadnet.hpp"

namespace cityplan {

/// Shortest node-to-node travel times, computed only for the source nodes
/// that cell-to-cell trips start from (targets of pavement edges).
class NodeTimes {
public:
    NodeTimes() = default;
    NodeTimes(const RoadNetwork& net, const CellGrid& grid);

    /// Throws ContractError when no row was computed for `from`.
    double operator()(NodeIndex from, NodeIndex to) const;
    bool has_source(NodeIndex from) const { return from < rows_.size() && !rows_[from].empty(); }

private:
    std::vector<std::vector<double>> rows_;
};

/// Sum of along-edge and off-network times of the cells in C_e.
struct EdgeVicinityTime {
    double time = 0.0;  // T_e, s
    std::size_t count = 0;
};

struct Precomputation {
    NodeTimes node_times;
    std::vector<EdgeVicinityTime> vicinity;  // per edge index
};

struct AccessibilityField {
    std::vector<double> avg_time;    // T(c), s
    std::vector<double> raw;         // 1 / T(c)
    std::vector<double> normalized;  // min-max scaled raw, in [0, 1]
};

/// Off-network walking time d_N / v0.
double network_access_time(const Cell& cell, double v0);

/// Travel time from cell i to cell j (flat indices). Cells sharing a nearest
/// edge travel directly between their projections; others go through the
/// network via edge target -> edge source shortest path.
double pair_travel_time(std::size_t from, std::size_t to, const RoadNetwork& net, const CellGrid& grid,
                        const NodeTimes& times);

EdgeVicinityTime edge_vicinity_time(EdgeIndex e, const RoadNetwork& net, const CellGrid& grid);

Precomputation precompute(const RoadNetwork& net, const CellGrid& grid);

/// Mean travel time from `cell` to the cells of C_e, for e other than the
/// cell's own nearest edge. Throws ContractError otherwise or if C_e is empty.
double neighborhood_avg_time(std::size_t cell, EdgeIndex e, const RoadNetwork& net, const CellGrid& grid,
                             const Precomputation& pre);

/// T(c) through the edge-partition decomposition; O(|C_{e^c}| + |E|).
double average_travel_time(std::size_t cell, const RoadNetwork& net, const CellGrid& grid,
                           const Precomputation& pre);

/// T(c) by direct summation over all cells; O(|C|). Reference path.
double naive_average_travel_time(std::size_t cell, const RoadNetwork& net, const CellGrid& grid,
                                 const NodeTimes& times);

/// Fills raw and normalized from avg_time.
void normalize_field(AccessibilityField& field);

AccessibilityField compute_field(const RoadNetwork& net, const CellGrid& grid);
AccessibilityField compute_field_naive(const RoadNetwork& net, const CellGrid& grid);

}  // namespace cityplan

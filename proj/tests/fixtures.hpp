#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cityplan/environment.hpp"
#include "cityplan/io.hpp"

namespace fixture {

inline std::string data_path(const std::string& rel) { return std::string(CITYPLAN_DATA_DIR) + "/" + rel; }

inline std::shared_ptr<const cityplan::CityMap> bundled(const std::string& name) {
    auto native = cityplan::load_map_file(data_path("maps/" + name));
    return std::make_shared<const cityplan::CityMap>(
        cityplan::prepare_map(name, std::move(native.network), cityplan::GridConfig{}, native.bounds));
}

/// A rows x cols map with a road along the bottom edge of the extent,
/// uniform accessibility `acc`, and an explicit visiting order.
inline std::shared_ptr<const cityplan::CityMap> hand_map(std::size_t rows, std::size_t cols,
                                                         std::vector<std::size_t> order, double acc = 0.5) {
    using namespace cityplan;
    CityMap m;
    m.name = "hand";
    m.network.add_node("a", {0, -50});
    m.network.add_node("b", {20.0 * static_cast<double>(cols), -50});
    m.network.add_edge(0, 1, 10.0);
    m.network = ensure_strong_connectivity(std::move(m.network));
    m.grid = CellGrid(20.0, {0, 0}, rows, cols);
    assign_nearest_edges(m.grid, m.network);
    m.field.avg_time.assign(m.grid.size(), 1.0);
    m.field.raw.assign(m.grid.size(), 1.0);
    m.field.normalized.assign(m.grid.size(), acc);
    m.order = std::move(order);
    return std::make_shared<const CityMap>(std::move(m));
}

}  // namespace fixture

#include "cityplan/landgrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "cityplan/errors.hpp"

namespace cityplan {

char land_use_code(LandUse use) {
    switch (use) {
        case LandUse::Undeveloped: return 'U';
        case LandUse::Street: return 'S';
        case LandUse::Residential: return 'H';
        case LandUse::Commercial: return 'C';
        case LandUse::Industrial: return 'I';
        case LandUse::Recreational: return 'R';
    }
    return '?';
}

LandUse land_use_from_code(char code) {
    switch (code) {
        case 'U': return LandUse::Undeveloped;
        case 'S': return LandUse::Street;
        case 'H': return LandUse::Residential;
        case 'C': return LandUse::Commercial;
        case 'I': return LandUse::Industrial;
        case 'R': return LandUse::Recreational;
        default: throw ParseError(std::string("unknown land-use code '") + code + "'");
    }
}

CellGrid::CellGrid(double cell_size, Vec2 origin, std::size_t rows, std::size_t cols)
    : cell_size_(cell_size), origin_(origin), rows_(rows), cols_(cols), cells_(rows * cols) {
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            Cell& cell = cells_[flat(r, c)];
            cell.index = {r, c};
            cell.center = {origin.x + (static_cast<double>(c) + 0.5) * cell_size,
                           origin.y + (static_cast<double>(r) + 0.5) * cell_size};
        }
}

void CellGrid::set_use(std::size_t flat_index, LandUse use) {
    Cell& c = cells_.at(flat_index);
    if (c.use == LandUse::Street && use != LandUse::Street)
        throw ContractError("street cells are immutable");
    c.use = use;
}

Rect CellGrid::cell_rect(std::size_t flat_index) const {
    const Vec2 center = cells_[flat_index].center;
    const double h = 0.5 * cell_size_;
    return {{center.x - h, center.y - h}, {center.x + h, center.y + h}};
}

std::string CellGrid::use_codes() const {
    std::string s;
    s.reserve(cells_.size());
    for (const Cell& c : cells_) s.push_back(land_use_code(c.use));
    return s;
}

GridLayout grid_layout(const Bounds& extent, const GridConfig& cfg) {
    auto count = [&](double span) {
        const double n = std::ceil(span / cfg.cell_size);
        return std::max<std::size_t>(1, static_cast<std::size_t>(n)) + 2 * cfg.margin_cells;
    };
    GridLayout layout;
    layout.cols = count(extent.max.x - extent.min.x);
    layout.rows = count(extent.max.y - extent.min.y);
    const Vec2 center = 0.5 * (extent.min + extent.max);
    layout.origin = {center.x - 0.5 * cfg.cell_size * static_cast<double>(layout.cols),
                     center.y - 0.5 * cfg.cell_size * static_cast<double>(layout.rows)};
    return layout;
}

Bounds network_bounds(const RoadNetwork& net) {
    Bounds b{{INFINITY, INFINITY}, {-INFINITY, -INFINITY}};
    for (const RoadEdge& e : net.edges()) {
        if (e.synthetic) continue;
        for (Vec2 p : e.geometry) {
            b.min = {std::min(b.min.x, p.x), std::min(b.min.y, p.y)};
            b.max = {std::max(b.max.x, p.x), std::max(b.max.y, p.y)};
        }
    }
    return b;
}

CellGrid build_grid(const RoadNetwork& net, const GridConfig& cfg, const std::optional<Bounds>& extra) {
    if (!(cfg.cell_size > 0.0) || !(cfg.develop_max_distance > 0.0))
        throw ContractError("grid config values must be positive");
    std::vector<EdgeIndex> pavement;
    for (EdgeIndex e = 0; e < net.edge_count(); ++e)
        if (!net.edge(e).synthetic) pavement.push_back(e);
    if (pavement.empty()) throw NetworkError("cannot build a grid over a network without edges");

    Bounds extent = network_bounds(net);
    if (extra) {
        extent.min = {std::min(extent.min.x, extra->min.x), std::min(extent.min.y, extra->min.y)};
        extent.max = {std::max(extent.max.x, extra->max.x), std::max(extent.max.y, extra->max.y)};
    }
    const GridLayout layout = grid_layout(extent, cfg);
    if (layout.rows * layout.cols > cfg.cell_budget)
        throw ContractError("grid of " + std::to_string(layout.rows) + "x" + std::to_string(layout.cols) +
                            " cells exceeds the cell budget of " + std::to_string(cfg.cell_budget));

    CellGrid grid(cfg.cell_size, layout.origin, layout.rows, layout.cols);
    assign_nearest_edges(grid, net);
    return grid;
}

void assign_nearest_edges(CellGrid& grid, const RoadNetwork& net) {
    std::vector<EdgeIndex> pavement;
    for (EdgeIndex e = 0; e < net.edge_count(); ++e)
        if (!net.edge(e).synthetic) pavement.push_back(e);
    if (pavement.empty()) throw NetworkError("cannot assign cells to a network without edges");
    grid.partition().assign(net.edge_count(), {});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Cell& cell = grid.cell(i);
        double best = std::numeric_limits<double>::infinity();
        for (EdgeIndex e : pavement) {
            const auto proj = project_on_polyline(cell.center, net.edge(e).geometry);
            if (proj.distance < best - nearest_tie_tolerance) {
                best = proj.distance;
                cell.nearest_edge = e;
                cell.projection = proj.point;
                cell.arc_from_source = proj.arc;
                cell.d_network = proj.distance;
            }
        }
        grid.partition()[cell.nearest_edge].push_back(i);
    }
}

void mark_streets(CellGrid& grid, const RoadNetwork& net) {
    const double cs = grid.cell_size();
    const Vec2 o = grid.origin();
    auto clamp_index = [](double v, std::size_t n) {
        return static_cast<long>(std::clamp(std::floor(v), 0.0, static_cast<double>(n) - 1.0));
    };
    for (const RoadEdge& e : net.edges()) {
        if (e.synthetic) continue;
        for (std::size_t k = 1; k < e.geometry.size(); ++k) {
            const Vec2 a = e.geometry[k - 1];
            const Vec2 b = e.geometry[k];
            const long c0 = clamp_index((std::min(a.x, b.x) - o.x) / cs - 1.0, grid.cols());
            const long c1 = clamp_index((std::max(a.x, b.x) - o.x) / cs + 1.0, grid.cols());
            const long r0 = clamp_index((std::min(a.y, b.y) - o.y) / cs - 1.0, grid.rows());
            const long r1 = clamp_index((std::max(a.y, b.y) - o.y) / cs + 1.0, grid.rows());
            for (long r = r0; r <= r1; ++r)
                for (long c = c0; c <= c1; ++c) {
                    const std::size_t i = grid.flat(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
                    if (segment_intersects_rect(a, b, grid.cell_rect(i))) grid.set_use(i, LandUse::Street);
                }
        }
    }
}

std::vector<std::size_t> developable_cells(const CellGrid& grid, std::span<const double> normalized,
                                           const GridConfig& cfg) {
    if (normalized.size() != grid.size()) throw ContractError("accessibility field does not match grid");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Cell& c = grid.cell(i);
        if (c.use != LandUse::Street && c.d_network <= cfg.develop_max_distance) out.push_back(i);
    }
    // flat index order is (row, col) order
    std::stable_sort(out.begin(), out.end(),
                     [&](std::size_t a, std::size_t b) { return normalized[a] > normalized[b]; });
    return out;
}

std::string serialize_grid_state(const CellGrid& grid) {
    nlohmann::ordered_json j;
    j["cell_size"] = grid.cell_size();
    j["origin"] = {grid.origin().x, grid.origin().y};
    j["rows"] = grid.rows();
    j["cols"] = grid.cols();
    j["uses"] = grid.use_codes();
    return j.dump() + "\n";
}

GridState parse_grid_state(std::string_view text) {
    GridState s;
    try {
        const auto j = nlohmann::json::parse(text);
        s.cell_size = j.at("cell_size").get<double>();
        s.origin = {j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>()};
        s.rows = j.at("rows").get<std::size_t>();
        s.cols = j.at("cols").get<std::size_t>();
        const auto codes = j.at("uses").get<std::string>();
        if (codes.size() != s.rows * s.cols) throw ParseError("grid state: uses length does not match dims");
        for (char c : codes) s.uses.push_back(land_use_from_code(c));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("grid state: ") + e.what());
    }
    return s;
}

}  // namespace cityplan

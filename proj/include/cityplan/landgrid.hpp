#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cityplan/geometry.hpp"
#include "cityplan/roadnet.hpp"

namespace cityplan {

enum class LandUse : unsigned char {
    Undeveloped,
    Street,
    Residential,
    Commercial,
    Industrial,
    Recreational,
};

/// Single-letter serialization code (U/S/H/C/I/R).
char land_use_code(LandUse use);
LandUse land_use_from_code(char code);

struct CellIndex {
    std::size_t row = 0;
    std::size_t col = 0;
    friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

struct Cell {
    CellIndex index;
    Vec2 center;
    EdgeIndex nearest_edge = 0;
    Vec2 projection;
    double arc_from_source = 0.0;  // along the nearest edge's geometry, m
    double d_network = 0.0;        // |center - projection|, m
    LandUse use = LandUse::Undeveloped;
};

struct GridConfig {
    double cell_size = 20.0;
    std::size_t margin_cells = 2;
    double develop_max_distance = 50.0;
    std::size_t cell_budget = 200'000;
};

/// Square-cell land grid. Row index grows with y, column index with x;
/// `origin` is the lower-left corner of cell (0, 0).
class CellGrid {
public:
    CellGrid() = default;
    CellGrid(double cell_size, Vec2 origin, std::size_t rows, std::size_t cols);

    double cell_size() const { return cell_size_; }
    Vec2 origin() const { return origin_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return cells_.size(); }

    std::size_t flat(CellIndex c) const { return c.row * cols_ + c.col; }
    std::size_t flat(std::size_t row, std::size_t col) const { return row * cols_ + col; }
    bool contains(long row, long col) const {
        return row >= 0 && col >= 0 && row < static_cast<long>(rows_) && col < static_cast<long>(cols_);
    }

    Cell& cell(std::size_t flat_index) { return cells_[flat_index]; }
    const Cell& cell(std::size_t flat_index) const { return cells_[flat_index]; }
    Cell& cell(CellIndex c) { return cells_[flat(c)]; }
    const Cell& cell(CellIndex c) const { return cells_[flat(c)]; }
    const std::vector<Cell>& cells() const { return cells_; }
    std::vector<Cell>& cells() { return cells_; }

    LandUse use(std::size_t flat_index) const { return cells_[flat_index].use; }
    /// Throws ContractError when touching a Street cell or painting one.
    void set_use(std::size_t flat_index, LandUse use);

    Rect cell_rect(std::size_t flat_index) const;

    /// C_e: flat indices of the cells whose nearest edge is `e`. Empty for
    /// synthetic edges.
    const std::vector<std::vector<std::size_t>>& partition() const { return partition_; }
    std::vector<std::vector<std::size_t>>& partition() { return partition_; }

    /// Row-major land-use codes.
    std::string use_codes() const;

private:
    double cell_size_ = 20.0;
    Vec2 origin_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Cell> cells_;
    std::vector<std::vector<std::size_t>> partition_;
};

/// Grid dimensions over `extent` expanded by the margin:
/// n = max(1, ceil(extent / cell_size)) + 2 * margin per axis, centered.
struct GridLayout {
    Vec2 origin;
    std::size_t rows = 0;
    std::size_t cols = 0;
};
GridLayout grid_layout(const Bounds& extent, const GridConfig& cfg);

inline constexpr double nearest_tie_tolerance = 1e-9;  // m

/// Bounding box of every non-synthetic edge geometry.
Bounds network_bounds(const RoadNetwork& net);

/// Builds the grid over the network (and the optional extra extent), assigning
/// every cell its nearest non-synthetic edge by exact point-to-polyline
/// distance. Edges within `nearest_tie_tolerance` of each other count as
/// equidistant and resolve to the lowest edge index, so a two-way street's
/// opposite edges do not split on rounding.
CellGrid build_grid(const RoadNetwork& net, const GridConfig& cfg,
                    const std::optional<Bounds>& extra = std::nullopt);

/// Assigns nearest edge, projection, arc and d_N to every cell of an
/// already laid-out grid and rebuilds the partition.
void assign_nearest_edges(CellGrid& grid, const RoadNetwork& net);

/// Marks as Street every cell whose closed square is crossed by a
/// non-synthetic edge segment. Idempotent.
void mark_streets(CellGrid& grid, const RoadNetwork& net);

/// Non-Street cells within `develop_max_distance` of the network, most
/// accessible first; ties by (row, col).
std::vector<std::size_t> developable_cells(const CellGrid& grid, std::span<const double> normalized,
                                           const GridConfig& cfg);

/// Structured-text (JSON) snapshot: cell_size, origin, rows, cols, uses.
std::string serialize_grid_state(const CellGrid& grid);

struct GridState {
    double cell_size = 0.0;
    Vec2 origin;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<LandUse> uses;
};
GridState parse_grid_state(std::string_view text);

}  // namespace cityplan

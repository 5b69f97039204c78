#include "cityplan/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "cityplan/errors.hpp"

namespace cityplan {

NeighborhoodCounts count_neighborhood(const CellGrid& grid, std::size_t cell, int K) {
    if (K < 1) throw ContractError("neighborhood radius must be at least 1");
    const CellIndex at = grid.cell(cell).index;
    const long r0 = static_cast<long>(at.row);
    const long c0 = static_cast<long>(at.col);
    NeighborhoodCounts n;
    for (long r = r0 - K; r <= r0 + K; ++r)
        for (long c = c0 - K; c <= c0 + K; ++c) {
            if ((r == r0 && c == c0) || !grid.contains(r, c)) continue;
            switch (grid.use(grid.flat(static_cast<std::size_t>(r), static_cast<std::size_t>(c)))) {
                case LandUse::Residential: ++n.res; break;
                case LandUse::Commercial: ++n.com; break;
                case LandUse::Industrial: ++n.ind; break;
                case LandUse::Recreational: ++n.rec; break;
                default: break;
            }
        }
    return n;
}

double residential_score(double accessibility, const NeighborhoodCounts& n, int K, const ScoreWeights& w) {
    const double k2 = static_cast<double>(K) * K;
    return accessibility * (w.hh * n.res + w.hc * n.com + w.hi * n.ind + w.hr * n.rec) / k2;
}

double industrial_score(double d_network, const NeighborhoodCounts& n, int K, const ScoreWeights& w) {
    const double k2 = static_cast<double>(K) * K;
    return std::exp(-d_network / w.industrial_decay) * w.ii * n.ind / k2;
}

double commercial_score(double accessibility, const NeighborhoodCounts& n, int K, const ScoreWeights& w) {
    const double k2 = static_cast<double>(K) * K;
    const double surplus = static_cast<double>(n.com - n.res);
    const double res = static_cast<double>(n.res);
    // saturation term peaks at com == res and is 0 at com == 0
    const double market = std::exp(-surplus * surplus / k2) - std::exp(-res * res / k2);
    return accessibility * (w.ch * res / k2 + w.cc * market);
}

double cell_score(const CellGrid& grid, std::span<const double> normalized, std::size_t cell, int K,
                  const ScoreWeights& w) {
    switch (grid.use(cell)) {
        case LandUse::Residential:
            return residential_score(normalized[cell], count_neighborhood(grid, cell, K), K, w);
        case LandUse::Commercial:
            return commercial_score(normalized[cell], count_neighborhood(grid, cell, K), K, w);
        case LandUse::Industrial:
            return industrial_score(grid.cell(cell).d_network, count_neighborhood(grid, cell, K), K, w);
        default:
            return 0.0;
    }
}

ScoreField total_score(const CellGrid& grid, std::span<const double> normalized, int K, const ScoreWeights& w) {
    if (normalized.size() != grid.size()) throw ContractError("accessibility field does not match grid");
    ScoreField f;
    f.scores.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        f.scores[i] = cell_score(grid, normalized, i, K, w);
        f.total += f.scores[i];
    }
    return f;
}

void apply_and_rescore(ScoreField& field, const CellGrid& grid, std::span<const double> normalized,
                       std::size_t changed_cell, int K, const ScoreWeights& w) {
    if (field.scores.size() != grid.size()) throw ContractError("score field does not match grid");
    const CellIndex at = grid.cell(changed_cell).index;
    const long r0 = static_cast<long>(at.row);
    const long c0 = static_cast<long>(at.col);
    double delta = 0.0;
    for (long r = r0 - K; r <= r0 + K; ++r)
        for (long c = c0 - K; c <= c0 + K; ++c) {
            if (!grid.contains(r, c)) continue;
            const std::size_t i = grid.flat(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            const double s = cell_score(grid, normalized, i, K, w);
            delta += s - field.scores[i];
            field.scores[i] = s;
        }
    field.total += delta;
}

}  // namespace cityplan

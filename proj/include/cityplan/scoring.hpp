#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cityplan/landgrid.hpp"

namespace cityplan {

/// Development weights; defaults are the reference table values.
struct ScoreWeights {
    double hh = 1.0;   // residential <- residential
    double hc = 3.0;   // residential <- commercial
    double hi = -4.0;  // residential <- industrial
    double hr = 6.0;   // residential <- recreational
    double ch = 3.0;   // commercial <- residential
    double cc = 6.0;   // commercial <- commercial
    double ii = 3.0;   // industrial <- industrial
    double industrial_decay = 10.0;  // m
};

struct NeighborhoodCounts {
    int res = 0;
    int com = 0;
    int ind = 0;
    int rec = 0;
    friend bool operator==(const NeighborhoodCounts&, const NeighborhoodCounts&) = default;
};

struct ScoreField {
    std::vector<double> scores;
    double total = 0.0;
};

/// Developed uses in the (2K+1)^2 square window around `cell`, center
/// excluded. Positions outside the grid count as nothing.
NeighborhoodCounts count_neighborhood(const CellGrid& grid, std::size_t cell, int K);

double residential_score(double accessibility, const NeighborhoodCounts& n, int K, const ScoreWeights& w);
double industrial_score(double d_network, const NeighborhoodCounts& n, int K, const ScoreWeights& w);
double commercial_score(double accessibility, const NeighborhoodCounts& n, int K, const ScoreWeights& w);

/// Score of one cell by its land use. Recreational, Street and Undeveloped are 0.
double cell_score(const CellGrid& grid, std::span<const double> normalized, std::size_t cell, int K,
                  const ScoreWeights& w);

ScoreField total_score(const CellGrid& grid, std::span<const double> normalized, int K, const ScoreWeights& w);

/// Updates `field` after a single cell changed: rescoring only the window of
/// radius K around it. The result matches total_score up to rounding in `total`.
void apply_and_rescore(ScoreField& field, const CellGrid& grid, std::span<const double> normalized,
                       std::size_t changed_cell, int K, const ScoreWeights& w);

}  // namespace cityplan

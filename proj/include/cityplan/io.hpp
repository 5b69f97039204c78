#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cityplan/accessibility.hpp"
#include "cityplan/environment.hpp"
#include "cityplan/landgrid.hpp"
#include "cityplan/roadnet.hpp"
#include "cityplan/scoring.hpp"

namespace cityplan {

std::string read_file(const std::filesystem::path& path);
/// Writes via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Picks the OSM reader for .osm/.xml, the JSON fixture reader otherwise.
NativeMap load_map_file(const std::filesystem::path& path, const NetworkConfig& cfg = {});

std::string format_double(double v);

/// row,col,avg_time_s,normalized
std::string accessibility_csv(const CellGrid& grid, const AccessibilityField& field);
/// row,col,use,score then a total line.
std::string scores_csv(const CellGrid& grid, const ScoreField& scores);
/// step,action,reward
std::string trace_csv(const EpisodeTrace& trace);

const char* action_name(Action a);

/// Binary PGM (P5); darker pixels are more accessible. North is up.
std::string accessibility_pgm(const CellGrid& grid, const AccessibilityField& field, int pixels_per_cell = 4);
/// Binary PPM (P6) with a fixed land-use palette. North is up.
std::string land_use_ppm(const CellGrid& grid, std::span<const LandUse> uses, int pixels_per_cell = 4);

struct Rgb {
    unsigned char r, g, b;
};
Rgb land_use_color(LandUse use);

}  // namespace cityplan

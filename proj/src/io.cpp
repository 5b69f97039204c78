#include "cityplan/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cityplan/errors.hpp"

namespace cityplan {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

NativeMap load_map_file(const std::filesystem::path& path, const NetworkConfig& cfg) {
    const std::string text = read_file(path);
    const auto ext = path.extension().string();
    if (ext == ".osm" || ext == ".xml") return {parse_osm_xml(text, cfg), std::nullopt};
    return parse_native_map(text, cfg);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string accessibility_csv(const CellGrid& grid, const AccessibilityField& field) {
    std::string out = "row,col,avg_time_s,normalized\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const CellIndex c = grid.cell(i).index;
        out += std::to_string(c.row) + ',' + std::to_string(c.col) + ',' + format_double(field.avg_time[i]) + ',' +
               format_double(field.normalized[i]) + '\n';
    }
    return out;
}

std::string scores_csv(const CellGrid& grid, const ScoreField& scores) {
    std::string out = "row,col,use,score\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Cell& c = grid.cell(i);
        out += std::to_string(c.index.row) + ',' + std::to_string(c.index.col) + ',' + land_use_code(c.use) + ',' +
               format_double(scores.scores[i]) + '\n';
    }
    out += "total,,," + format_double(scores.total) + '\n';
    return out;
}

const char* action_name(Action a) {
    switch (a) {
        case Action::BuildResidential: return "residential";
        case Action::BuildCommercial: return "commercial";
        case Action::BuildIndustrial: return "industrial";
        case Action::BuildRecreational: return "recreational";
    }
    return "?";
}

std::string trace_csv(const EpisodeTrace& trace) {
    std::string out = "step,action,reward\n";
    for (std::size_t i = 0; i < trace.actions.size(); ++i)
        out += std::to_string(i) + ',' + action_name(trace.actions[i]) + ',' + format_double(trace.rewards[i]) + '\n';
    return out;
}

Rgb land_use_color(LandUse use) {
    switch (use) {
        case LandUse::Undeveloped: return {255, 255, 255};
        case LandUse::Street: return {128, 128, 128};
        case LandUse::Residential: return {240, 210, 40};
        case LandUse::Commercial: return {40, 90, 220};
        case LandUse::Industrial: return {130, 40, 160};
        case LandUse::Recreational: return {50, 170, 70};
    }
    return {0, 0, 0};
}

namespace {

template <class PixelFn>
std::string raster(const CellGrid& grid, int ppc, const char* magic, int channels, PixelFn pixel) {
    const std::size_t w = grid.cols() * static_cast<std::size_t>(ppc);
    const std::size_t h = grid.rows() * static_cast<std::size_t>(ppc);
    std::string out = std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    const std::size_t header = out.size();
    out.resize(header + w * h * static_cast<std::size_t>(channels));
    unsigned char* px = reinterpret_cast<unsigned char*>(out.data() + header);
    for (std::size_t y = 0; y < h; ++y) {
        const std::size_t row = grid.rows() - 1 - y / static_cast<std::size_t>(ppc);
        for (std::size_t x = 0; x < w; ++x) {
            const std::size_t col = x / static_cast<std::size_t>(ppc);
            pixel(grid.flat(row, col), px + (y * w + x) * static_cast<std::size_t>(channels));
        }
    }
    return out;
}

}  // namespace

std::string accessibility_pgm(const CellGrid& grid, const AccessibilityField& field, int pixels_per_cell) {
    return raster(grid, pixels_per_cell, "P5", 1, [&](std::size_t i, unsigned char* p) {
        p[0] = static_cast<unsigned char>(std::lround(255.0 * (1.0 - field.normalized[i])));
    });
}

std::string land_use_ppm(const CellGrid& grid, std::span<const LandUse> uses, int pixels_per_cell) {
    if (uses.size() != grid.size()) throw ContractError("land-use vector does not match grid");
    return raster(grid, pixels_per_cell, "P6", 3, [&](std::size_t i, unsigned char* p) {
        const Rgb c = land_use_color(uses[i]);
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
    });
}

}  // namespace cityplan

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "cityplan/environment.hpp"
#include "cityplan/landgrid.hpp"
#include "cityplan/qlearn.hpp"
#include "cityplan/roadnet.hpp"
#include "cityplan/scoring.hpp"

namespace cityplan {

/// Every tunable of a run. Loaded from a JSON object with flat dotted keys,
/// e.g. {"grid.cell_size": 20, "weights.hi": -4, "train.episodes": 500}.
/// Speeds in the file are km/h.
struct RunConfig {
    NetworkConfig network;
    GridConfig grid;
    ScoreWeights weights;
    EnvConfig env;
    TrainConfig train;
    std::size_t bench_episodes = 1000;
    std::uint64_t seed = 0;
};

/// Throws ParseError on unknown keys or ill-typed values.
RunConfig parse_run_config(std::string_view text);
/// Applies the keys in `text` on top of `base`.
void apply_run_config(RunConfig& base, std::string_view text);
/// The effective configuration as flat dotted JSON.
std::string dump_run_config(const RunConfig& cfg);

}  // namespace cityplan

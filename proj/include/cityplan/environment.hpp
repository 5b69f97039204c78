#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "cityplan/accessibility.hpp"
#include "cityplan/landgrid.hpp"
#include "cityplan/scoring.hpp"

namespace cityplan {

using Rng = std::mt19937_64;

enum class Action : int {
    BuildResidential = 0,
    BuildCommercial = 1,
    BuildIndustrial = 2,
    BuildRecreational = 3,
};
inline constexpr int action_count = 4;
inline constexpr std::array<Action, action_count> all_actions = {
    Action::BuildResidential, Action::BuildCommercial, Action::BuildIndustrial, Action::BuildRecreational};

LandUse land_use_for(Action a);

/// Observation window of side 2K+1 with 6 layers: one-hot Residential,
/// Commercial, Industrial, Recreational, Street, then normalized
/// accessibility. Stored layer-major: data[(layer * side + i) * side + j].
struct StateTensor {
    static constexpr int layers = 6;
    int side = 0;
    std::vector<double> data;

    StateTensor() = default;
    explicit StateTensor(int side_) : side(side_), data(static_cast<std::size_t>(layers * side_ * side_), 0.0) {}

    double& at(int i, int j, int layer) { return data[static_cast<std::size_t>((layer * side + i) * side + j)]; }
    double at(int i, int j, int layer) const { return data[static_cast<std::size_t>((layer * side + i) * side + j)]; }
};

struct Transition {
    StateTensor state;
    Action action = Action::BuildResidential;
    double reward = 0.0;
    StateTensor next_state;
    bool terminal = false;
};

struct EnvConfig {
    int K = 3;
    std::size_t max_iterations = 0;  // 0: visit every developable cell
    std::uint64_t rng_seed = 0;
};

/// A prepared map: network, land grid with streets marked, accessibility.
struct CityMap {
    std::string name;
    RoadNetwork network;
    CellGrid grid;
    AccessibilityField field;
    std::vector<std::size_t> order;  // developable cells, most accessible first
};

/// Parses, repairs, grids and scores a network: the full preparation
/// pipeline, with streets marked after accessibility is computed.
CityMap prepare_map(std::string name, RoadNetwork net, const GridConfig& grid_cfg,
                    const std::optional<Bounds>& extent = std::nullopt);

/// Visits developable cells from most to least accessible and applies one
/// development per step. Reward is the post-action map total.
class Environment {
public:
    Environment(std::shared_ptr<const CityMap> map, const EnvConfig& cfg, const ScoreWeights& weights = {});

    /// Clears all developments and returns the initial observation.
    StateTensor reset();
    StateTensor observe() const;

    struct StepResult {
        double reward = 0.0;
        StateTensor observation;
        bool terminal = false;
    };
    StepResult step(Action a);

    /// Post-action total for `a` without committing it. Leaves no trace.
    double probe_reward(Action a);

    bool terminal() const { return terminal_; }
    std::size_t cursor_cell() const;
    std::size_t steps_taken() const { return steps_; }
    std::size_t episode_length() const;
    double total() const { return scores_.total; }

    const CellGrid& grid() const { return grid_; }
    const CityMap& map() const { return *map_; }
    const ScoreField& scores() const { return scores_; }
    int K() const { return cfg_.K; }
    const ScoreWeights& weights() const { return weights_; }

private:
    std::shared_ptr<const CityMap> map_;
    EnvConfig cfg_;
    ScoreWeights weights_;
    CellGrid grid_;
    ScoreField scores_;
    std::size_t position_ = 0;  // index into map_->order
    std::size_t steps_ = 0;
    bool terminal_ = false;
};

/// Action-selection strategy. `env` may be probed but must be left as found.
class Policy {
public:
    virtual ~Policy() = default;
    virtual Action select(const StateTensor& observation, Environment& env, Rng& rng) = 0;
};

struct EpisodeTrace {
    std::vector<Action> actions;
    std::vector<double> rewards;  // post-action map totals
    std::vector<LandUse> final_uses;
    double final_reward() const { return rewards.empty() ? 0.0 : rewards.back(); }
};

/// Resets `env` and plays one full episode with `policy`.
EpisodeTrace run_episode(Environment& env, Policy& policy, Rng& rng);

}  // namespace cityplan

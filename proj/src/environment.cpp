#include "cityplan/environment.hpp"

#include "cityplan/errors.hpp"

namespace cityplan {

LandUse land_use_for(Action a) {
    switch (a) {
        case Action::BuildResidential: return LandUse::Residential;
        case Action::BuildCommercial: return LandUse::Commercial;
        case Action::BuildIndustrial: return LandUse::Industrial;
        case Action::BuildRecreational: return LandUse::Recreational;
    }
    throw ContractError("invalid action");
}

CityMap prepare_map(std::string name, RoadNetwork net, const GridConfig& grid_cfg,
                    const std::optional<Bounds>& extent) {
    CityMap map;
    map.name = std::move(name);
    map.network = ensure_strong_connectivity(std::move(net));
    map.grid = build_grid(map.network, grid_cfg, extent);
    map.field = compute_field(map.network, map.grid);
    mark_streets(map.grid, map.network);
    map.order = developable_cells(map.grid, map.field.normalized, grid_cfg);
    return map;
}

Environment::Environment(std::shared_ptr<const CityMap> map, const EnvConfig& cfg, const ScoreWeights& weights)
    : map_(std::move(map)), cfg_(cfg), weights_(weights), grid_(map_->grid) {
    if (cfg_.K < 1) throw ContractError("view radius K must be at least 1");
    reset();
}

StateTensor Environment::reset() {
    if (map_->order.empty()) throw ContractError("map '" + map_->name + "' has no developable cells");
    for (std::size_t i = 0; i < grid_.size(); ++i)
        if (grid_.use(i) != LandUse::Street) grid_.set_use(i, LandUse::Undeveloped);
    scores_.scores.assign(grid_.size(), 0.0);
    scores_.total = 0.0;
    position_ = 0;
    steps_ = 0;
    terminal_ = false;
    return observe();
}

std::size_t Environment::episode_length() const {
    const std::size_t n = map_->order.size();
    return cfg_.max_iterations == 0 ? n : std::min(n, cfg_.max_iterations);
}

std::size_t Environment::cursor_cell() const {
    // once the episode ends the view stays on the last developed cell
    return map_->order[terminal_ ? position_ - 1 : position_];
}

StateTensor Environment::observe() const {
    const int K = cfg_.K;
    StateTensor s(2 * K + 1);
    const CellIndex at = grid_.cell(cursor_cell()).index;
    const auto& normalized = map_->field.normalized;
    for (int i = 0; i < s.side; ++i)
        for (int j = 0; j < s.side; ++j) {
            const long r = static_cast<long>(at.row) + i - K;
            const long c = static_cast<long>(at.col) + j - K;
            if (!grid_.contains(r, c)) continue;
            const std::size_t f = grid_.flat(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            switch (grid_.use(f)) {
                case LandUse::Residential: s.at(i, j, 0) = 1.0; break;
                case LandUse::Commercial: s.at(i, j, 1) = 1.0; break;
                case LandUse::Industrial: s.at(i, j, 2) = 1.0; break;
                case LandUse::Recreational: s.at(i, j, 3) = 1.0; break;
                case LandUse::Street: s.at(i, j, 4) = 1.0; break;
                case LandUse::Undeveloped: break;
            }
            s.at(i, j, 5) = normalized[f];
        }
    return s;
}

Environment::StepResult Environment::step(Action a) {
    if (terminal_) throw ContractError("step called on a finished episode");
    const std::size_t cell = map_->order[position_];
    if (grid_.use(cell) != LandUse::Undeveloped) throw ContractError("cursor cell is already developed");
    grid_.set_use(cell, land_use_for(a));
    apply_and_rescore(scores_, grid_, map_->field.normalized, cell, cfg_.K, weights_);
    ++position_;
    ++steps_;
    terminal_ = position_ >= map_->order.size() || steps_ >= episode_length();
    return {scores_.total, observe(), terminal_};
}

double Environment::probe_reward(Action a) {
    if (terminal_) throw ContractError("probe called on a finished episode");
    const std::size_t cell = map_->order[position_];
    const int K = cfg_.K;
    const CellIndex at = grid_.cell(cell).index;

    std::vector<std::pair<std::size_t, double>> saved;
    saved.reserve(static_cast<std::size_t>((2 * K + 1) * (2 * K + 1)));
    for (long r = static_cast<long>(at.row) - K; r <= static_cast<long>(at.row) + K; ++r)
        for (long c = static_cast<long>(at.col) - K; c <= static_cast<long>(at.col) + K; ++c)
            if (grid_.contains(r, c)) {
                const std::size_t f = grid_.flat(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
                saved.emplace_back(f, scores_.scores[f]);
            }
    const double saved_total = scores_.total;
    const LandUse before = grid_.use(cell);

    grid_.set_use(cell, land_use_for(a));
    apply_and_rescore(scores_, grid_, map_->field.normalized, cell, K, weights_);
    const double reward = scores_.total;

    grid_.set_use(cell, before);
    for (const auto& [f, s] : saved) scores_.scores[f] = s;
    scores_.total = saved_total;
    return reward;
}

EpisodeTrace run_episode(Environment& env, Policy& policy, Rng& rng) {
    EpisodeTrace trace;
    StateTensor obs = env.reset();
    trace.actions.reserve(env.episode_length());
    trace.rewards.reserve(env.episode_length());
    while (!env.terminal()) {
        const Action a = policy.select(obs, env, rng);
        auto result = env.step(a);
        trace.actions.push_back(a);
        trace.rewards.push_back(result.reward);
        obs = std::move(result.observation);
    }
    trace.final_uses.reserve(env.grid().size());
    for (const Cell& c : env.grid().cells()) trace.final_uses.push_back(c.use);
    return trace;
}

}  // namespace cityplan

#include "cityplan/config.hpp"

#include <functional>
#include <map>

#include <json.hpp>

#include "cityplan/errors.hpp"

namespace cityplan {

namespace {

using json = nlohmann::json;

template <class T>
std::function<void(const json&)> set(T& field) {
    return [&field](const json& v) { field = v.get<T>(); };
}

std::function<void(const json&)> set_kmh(double& field) {
    return [&field](const json& v) { field = kmh_to_mps(v.get<double>()); };
}

std::map<std::string, std::function<void(const json&)>> setters(RunConfig& c) {
    return {
        {"network.v0_kmh", set_kmh(c.network.v0)},
        {"network.default_speed_kmh", set_kmh(c.network.default_speed)},
        {"network.drivable_tags", set(c.network.drivable_tags)},
        {"grid.cell_size", set(c.grid.cell_size)},
        {"grid.margin_cells", set(c.grid.margin_cells)},
        {"grid.develop_max_distance", set(c.grid.develop_max_distance)},
        {"grid.cell_budget", set(c.grid.cell_budget)},
        {"weights.hh", set(c.weights.hh)},
        {"weights.hc", set(c.weights.hc)},
        {"weights.hi", set(c.weights.hi)},
        {"weights.hr", set(c.weights.hr)},
        {"weights.ch", set(c.weights.ch)},
        {"weights.cc", set(c.weights.cc)},
        {"weights.ii", set(c.weights.ii)},
        {"weights.industrial_decay", set(c.weights.industrial_decay)},
        {"env.K", set(c.env.K)},
        {"env.max_iterations", set(c.env.max_iterations)},
        {"train.batch_size", set(c.train.batch_size)},
        {"train.epsilon0", set(c.train.epsilon0)},
        {"train.epsilon_decay", set(c.train.epsilon_decay)},
        {"train.epsilon_min", set(c.train.epsilon_min)},
        {"train.gamma", set(c.train.gamma)},
        {"train.learning_rate", set(c.train.learning_rate)},
        {"train.momentum", set(c.train.momentum)},
        {"train.dropout", set(c.train.dropout)},
        {"train.episodes", set(c.train.episodes)},
        {"train.replay_capacity", set(c.train.replay_capacity)},
        {"train.filters1", set(c.train.network.filters1)},
        {"train.filters2", set(c.train.network.filters2)},
        {"train.hidden", set(c.train.network.hidden)},
        {"bench.episodes", set(c.bench_episodes)},
        {"seed", set(c.seed)},
    };
}

void validate(const RunConfig& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ParseError(std::string("config: ") + what);
    };
    require(c.network.v0 > 0.0 && c.network.default_speed > 0.0, "speeds must be positive");
    require(c.grid.cell_size > 0.0 && c.grid.develop_max_distance > 0.0, "grid sizes must be positive");
    require(c.weights.industrial_decay > 0.0, "weights.industrial_decay must be positive");
    require(c.env.K >= 1, "env.K must be at least 1");
    require(c.train.batch_size >= 1, "train.batch_size must be at least 1");
    require(c.train.gamma >= 0.0 && c.train.gamma <= 1.0, "train.gamma must lie in [0, 1]");
    require(c.train.epsilon_decay > 0.0 && c.train.epsilon_decay <= 1.0, "train.epsilon_decay must lie in (0, 1]");
    require(c.train.dropout >= 0.0 && c.train.dropout < 1.0, "train.dropout must lie in [0, 1)");
    require(c.train.replay_capacity >= 1, "train.replay_capacity must be at least 1");
}

}  // namespace

void apply_run_config(RunConfig& base, std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("config: expected a JSON object");
    auto table = setters(base);
    for (const auto& [key, value] : doc.items()) {
        auto it = table.find(key);
        if (it == table.end()) throw ParseError("config: unknown key '" + key + "'");
        try {
            it->second(value);
        } catch (const json::exception& e) {
            throw ParseError("config: bad value for '" + key + "': " + e.what());
        }
    }
    validate(base);
}

RunConfig parse_run_config(std::string_view text) {
    RunConfig c;
    apply_run_config(c, text);
    return c;
}

std::string dump_run_config(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["network.v0_kmh"] = c.network.v0 * 3.6;
    j["network.default_speed_kmh"] = c.network.default_speed * 3.6;
    j["network.drivable_tags"] = c.network.drivable_tags;
    j["grid.cell_size"] = c.grid.cell_size;
    j["grid.margin_cells"] = c.grid.margin_cells;
    j["grid.develop_max_distance"] = c.grid.develop_max_distance;
    j["grid.cell_budget"] = c.grid.cell_budget;
    j["weights.hh"] = c.weights.hh;
    j["weights.hc"] = c.weights.hc;
    j["weights.hi"] = c.weights.hi;
    j["weights.hr"] = c.weights.hr;
    j["weights.ch"] = c.weights.ch;
    j["weights.cc"] = c.weights.cc;
    j["weights.ii"] = c.weights.ii;
    j["weights.industrial_decay"] = c.weights.industrial_decay;
    j["env.K"] = c.env.K;
    j["env.max_iterations"] = c.env.max_iterations;
    j["train.batch_size"] = c.train.batch_size;
    j["train.epsilon0"] = c.train.epsilon0;
    j["train.epsilon_decay"] = c.train.epsilon_decay;
    j["train.epsilon_min"] = c.train.epsilon_min;
    j["train.gamma"] = c.train.gamma;
    j["train.learning_rate"] = c.train.learning_rate;
    j["train.momentum"] = c.train.momentum;
    j["train.dropout"] = c.train.dropout;
    j["train.episodes"] = c.train.episodes;
    j["train.replay_capacity"] = c.train.replay_capacity;
    j["train.filters1"] = c.train.network.filters1;
    j["train.filters2"] = c.train.network.filters2;
    j["train.hidden"] = c.train.network.hidden;
    j["bench.episodes"] = c.bench_episodes;
    j["seed"] = c.seed;
    return j.dump(2) + "\n";
}

}  // namespace cityplan

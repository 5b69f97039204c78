#include "cityplan/commands.hpp"

#include <algorithm>
#include <cmath>

#include "cityplan/io.hpp"
#include "cityplan/policies.hpp"

namespace cityplan {

namespace fs = std::filesystem;

std::shared_ptr<const CityMap> load_city_map(const fs::path& path, const RunConfig& cfg) {
    NativeMap src = load_map_file(path, cfg.network);
    return std::make_shared<const CityMap>(
        prepare_map(path.stem().string(), std::move(src.network), cfg.grid, src.bounds));
}

AccessReport cmd_access(const fs::path& input, const RunConfig& cfg, const fs::path& out_dir, bool oracle) {
    NativeMap src = load_map_file(input, cfg.network);
    const RoadNetwork net = ensure_strong_connectivity(std::move(src.network));
    const CellGrid grid = build_grid(net, cfg.grid, src.bounds);
    const AccessibilityField field = compute_field(net, grid);

    AccessReport report;
    report.csv = out_dir / "access.csv";
    report.image = out_dir / "access.pgm";
    write_file_atomic(report.csv, accessibility_csv(grid, field));
    write_file_atomic(report.image, accessibility_pgm(grid, field));
    if (oracle) {
        const AccessibilityField naive = compute_field_naive(net, grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double ref = naive.avg_time[i];
            const double dev = std::abs(field.avg_time[i] - ref) / std::max(std::abs(ref), 1e-300);
            worst = std::max(worst, ref == 0.0 && field.avg_time[i] == 0.0 ? 0.0 : dev);
        }
        report.oracle_max_rel_deviation = worst;
    }
    return report;
}

PolicyKind parse_policy_kind(const std::string& name) {
    if (name == "random") return PolicyKind::Random;
    if (name == "greedy") return PolicyKind::Greedy;
    if (name == "trained") return PolicyKind::Trained;
    throw UsageError("unknown policy '" + name + "' (expected random, greedy or trained)");
}

const char* policy_kind_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Random: return "random";
        case PolicyKind::Greedy: return "greedy";
        case PolicyKind::Trained: return "trained";
    }
    return "?";
}

namespace {

EnvConfig env_config(const RunConfig& cfg) {
    EnvConfig e = cfg.env;
    e.rng_seed = cfg.seed;
    return e;
}

std::shared_ptr<const QNetwork> load_weights(const fs::path& path, int K) {
    auto net = std::make_shared<const QNetwork>(QNetwork::load(read_file(path)));
    if (net->shape().K != K)
        throw ShapeError("weights in " + path.string() + " expect K=" + std::to_string(net->shape().K) +
                         " but the configuration uses K=" + std::to_string(K));
    return net;
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, const std::optional<fs::path>& weights, int K) {
    switch (kind) {
        case PolicyKind::Random: return std::make_unique<RandomPolicy>();
        case PolicyKind::Greedy: return std::make_unique<GreedyPolicy>();
        case PolicyKind::Trained:
            if (!weights) throw UsageError("the trained policy needs --weights");
            return std::make_unique<LearnedPolicy>(load_weights(*weights, K));
    }
    throw UsageError("unknown policy");
}

}  // namespace

DevelopReport cmd_develop(const fs::path& input, PolicyKind kind, const std::optional<fs::path>& weights,
                          const RunConfig& cfg, const fs::path& out_dir) {
    auto policy = make_policy(kind, weights, cfg.env.K);
    auto map = load_city_map(input, cfg);
    Environment env(map, env_config(cfg), cfg.weights);
    Rng rng(cfg.seed);
    const EpisodeTrace trace = run_episode(env, *policy, rng);

    write_file_atomic(out_dir / "grid.json", serialize_grid_state(env.grid()));
    write_file_atomic(out_dir / "trace.csv", trace_csv(trace));
    write_file_atomic(out_dir / "scores.csv", scores_csv(env.grid(), env.scores()));
    write_file_atomic(out_dir / "map.ppm", land_use_ppm(env.grid(), trace.final_uses));
    return {trace.final_reward(), trace.actions.size()};
}

std::vector<fs::path> list_map_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw UsageError(dir.string() + " is not a directory");
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension().string();
        if (entry.is_regular_file() && (ext == ".json" || ext == ".osm" || ext == ".xml")) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

TrainResult cmd_train(const fs::path& map_dir, const RunConfig& cfg, const fs::path& out_dir,
                      const std::optional<fs::path>& resume) {
    const auto files = list_map_files(map_dir);
    if (files.empty()) throw UsageError("no map files in " + map_dir.string());
    std::vector<std::shared_ptr<const CityMap>> pool;
    for (const auto& f : files) pool.push_back(load_city_map(f, cfg));

    TrainConfig tc = cfg.train;
    tc.rng_seed = cfg.seed;
    std::optional<QNetwork> initial;
    if (resume) initial = *load_weights(*resume, cfg.env.K);
    TrainResult result = train(tc, pool, env_config(cfg), cfg.weights, std::move(initial));

    write_file_atomic(out_dir / "weights.bin", result.network.save());
    write_file_atomic(out_dir / "training_log.csv", training_log_csv(result.log));
    return result;
}

std::vector<double> policy_rewards(std::shared_ptr<const CityMap> map, Policy& policy, std::size_t episodes,
                                   std::uint64_t seed, const RunConfig& cfg) {
    Environment env(std::move(map), env_config(cfg), cfg.weights);
    Rng rng(seed);
    std::vector<double> rewards;
    rewards.reserve(episodes);
    for (std::size_t i = 0; i < episodes; ++i) rewards.push_back(run_episode(env, policy, rng).final_reward());
    return rewards;
}

std::vector<BenchRow> cmd_bench(const std::vector<fs::path>& maps, const std::vector<PolicyKind>& policies,
                                std::size_t episodes, const std::optional<fs::path>& weights, const RunConfig& cfg,
                                const fs::path& out_dir) {
    if (maps.empty()) throw UsageError("bench needs at least one map");
    if (episodes == 0) throw UsageError("bench needs at least one episode");
    std::vector<BenchRow> rows;
    for (const auto& path : maps) {
        auto map = load_city_map(path, cfg);
        for (PolicyKind kind : policies) {
            auto policy = make_policy(kind, weights, cfg.env.K);
            const std::size_t n = kind == PolicyKind::Trained ? 1 : episodes;
            const auto rewards = policy_rewards(map, *policy, n, cfg.seed, cfg);
            BenchRow row{map->name, policy_kind_name(kind), n, 0.0, 0.0};
            for (double r : rewards) row.mean_reward += r;
            row.mean_reward /= static_cast<double>(n);
            if (n > 1) {
                double ss = 0.0;
                for (double r : rewards) ss += (r - row.mean_reward) * (r - row.mean_reward);
                row.std_reward = std::sqrt(ss / static_cast<double>(n - 1));
            }
            rows.push_back(std::move(row));
        }
    }
    write_file_atomic(out_dir / "bench.csv", bench_csv(rows));
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "map,policy,episodes,mean_reward,std_reward\n";
    for (const auto& r : rows)
        out += r.map + ',' + r.policy + ',' + std::to_string(r.episodes) + ',' + format_double(r.mean_reward) + ',' +
               format_double(r.std_reward) + '\n';
    return out;
}

}  // namespace cityplan

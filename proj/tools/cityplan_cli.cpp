// cityplan: accessibility maps, land-use development runs, Q-network
// training and policy benchmarks over road networks.

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cityplan/commands.hpp"
#include "cityplan/io.hpp"

namespace fs = std::filesystem;
using namespace cityplan;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON file with flat dotted keys");
    cmd->add_option("--seed", c.seed, "master seed (overrides the config file)");
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
}

RunConfig resolve(const Common& c) {
    RunConfig cfg;
    if (!c.config.empty()) apply_run_config(cfg, read_file(c.config));
    if (c.seed) cfg.seed = *c.seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Procedural land-use development over road networks"};
    app.require_subcommand(1);

    Common access_opts, develop_opts, train_opts, bench_opts;

    auto* access = app.add_subcommand("access", "per-cell average travel time and accessibility");
    add_common(access, access_opts);
    std::string access_input;
    bool oracle = false;
    access->add_option("input", access_input, "map file (.json fixture or .osm)")->required();
    access->add_flag("--oracle", oracle, "cross-check against direct pairwise averaging");

    auto* develop = app.add_subcommand("develop", "develop one map with a policy");
    add_common(develop, develop_opts);
    std::string develop_input, develop_policy = "greedy";
    std::optional<std::string> develop_weights;
    develop->add_option("input", develop_input, "map file")->required();
    develop->add_option("--policy", develop_policy, "random, greedy or trained")->capture_default_str();
    develop->add_option("--weights", develop_weights, "weight file for the trained policy");

    auto* train_cmd = app.add_subcommand("train", "train the Q-network on a directory of maps");
    add_common(train_cmd, train_opts);
    std::string train_dir;
    std::optional<std::string> resume;
    std::optional<std::size_t> train_episodes;
    train_cmd->add_option("maps", train_dir, "directory of map files")->required();
    train_cmd->add_option("--resume", resume, "continue from an existing weight file");
    train_cmd->add_option("--episodes", train_episodes, "episode count (overrides the config file)");

    auto* bench = app.add_subcommand("bench", "compare policies over repeated episodes");
    add_common(bench, bench_opts);
    std::vector<std::string> bench_maps;
    std::vector<std::string> bench_policies = {"random", "greedy"};
    std::optional<std::size_t> bench_episodes;
    std::optional<std::string> bench_weights;
    bench->add_option("maps", bench_maps, "map files")->required();
    bench->add_option("--policies", bench_policies, "policies to compare")->delimiter(',')->capture_default_str();
    bench->add_option("--episodes", bench_episodes, "episodes per (map, policy)");
    bench->add_option("--weights", bench_weights, "weight file for the trained policy");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*access) {
            const RunConfig cfg = resolve(access_opts);
            const auto report = cmd_access(access_input, cfg, access_opts.out, oracle);
            std::cout << "wrote " << report.csv.string() << " and " << report.image.string() << "\n";
            if (report.oracle_max_rel_deviation)
                std::cout << "oracle max relative deviation: " << format_double(*report.oracle_max_rel_deviation)
                          << "\n";
        } else if (*develop) {
            const RunConfig cfg = resolve(develop_opts);
            std::optional<fs::path> weights;
            if (develop_weights) weights = *develop_weights;
            const auto report =
                cmd_develop(develop_input, parse_policy_kind(develop_policy), weights, cfg, develop_opts.out);
            std::cout << "steps " << report.steps << ", final reward " << format_double(report.final_reward) << "\n";
        } else if (*train_cmd) {
            RunConfig cfg = resolve(train_opts);
            if (train_episodes) cfg.train.episodes = *train_episodes;
            std::optional<fs::path> resume_path;
            if (resume) resume_path = *resume;
            const auto result = cmd_train(train_dir, cfg, train_opts.out, resume_path);
            if (!result.log.empty())
                std::cout << "episodes " << result.log.size() << ", last reward "
                          << format_double(result.log.back().total_reward) << "\n";
        } else if (*bench) {
            const RunConfig cfg = resolve(bench_opts);
            std::vector<fs::path> maps(bench_maps.begin(), bench_maps.end());
            std::vector<PolicyKind> kinds;
            for (const auto& p : bench_policies) kinds.push_back(parse_policy_kind(p));
            std::optional<fs::path> weights;
            if (bench_weights) weights = *bench_weights;
            const auto rows =
                cmd_bench(maps, kinds, bench_episodes.value_or(cfg.bench_episodes), weights, cfg, bench_opts.out);
            std::cout << bench_csv(rows);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

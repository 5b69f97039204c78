#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cityplan/config.hpp"
#include "cityplan/environment.hpp"
#include "cityplan/errors.hpp"
#include "cityplan/qnetwork.hpp"

namespace cityplan {

/// Thrown for bad command-line usage (exit code 2).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Loads a map file and runs the preparation pipeline with `cfg`.
std::shared_ptr<const CityMap> load_city_map(const std::filesystem::path& path, const RunConfig& cfg);

struct AccessReport {
    std::filesystem::path csv;
    std::filesystem::path image;
    std::optional<double> oracle_max_rel_deviation;
};
/// Writes access.csv and access.pgm into `out_dir`.
AccessReport cmd_access(const std::filesystem::path& input, const RunConfig& cfg,
                        const std::filesystem::path& out_dir, bool oracle);

enum class PolicyKind { Random, Greedy, Trained };
PolicyKind parse_policy_kind(const std::string& name);
const char* policy_kind_name(PolicyKind kind);

struct DevelopReport {
    double final_reward = 0.0;
    std::size_t steps = 0;
};
/// Writes grid.json, trace.csv, scores.csv and map.ppm into `out_dir`.
DevelopReport cmd_develop(const std::filesystem::path& input, PolicyKind policy,
                          const std::optional<std::filesystem::path>& weights, const RunConfig& cfg,
                          const std::filesystem::path& out_dir);

/// Map files (.json, .osm, .xml) directly inside `dir`, sorted by name.
std::vector<std::filesystem::path> list_map_files(const std::filesystem::path& dir);

/// Writes weights.bin and training_log.csv into `out_dir`.
TrainResult cmd_train(const std::filesystem::path& map_dir, const RunConfig& cfg,
                      const std::filesystem::path& out_dir,
                      const std::optional<std::filesystem::path>& resume = std::nullopt);

struct BenchRow {
    std::string map;
    std::string policy;
    std::size_t episodes = 0;
    double mean_reward = 0.0;
    double std_reward = 0.0;  // sample standard deviation, 0 for one episode
};
/// Final-reward statistics per (map, policy) over `episodes` runs; trained
/// runs once since it is deterministic. Writes bench.csv into `out_dir`.
std::vector<BenchRow> cmd_bench(const std::vector<std::filesystem::path>& maps,
                                const std::vector<PolicyKind>& policies, std::size_t episodes,
                                const std::optional<std::filesystem::path>& weights, const RunConfig& cfg,
                                const std::filesystem::path& out_dir);

/// Final rewards of `episodes` runs of `policy` on `map`, drawing every
/// episode from one generator seeded with `seed`.
std::vector<double> policy_rewards(std::shared_ptr<const CityMap> map, Policy& policy, std::size_t episodes,
                                   std::uint64_t seed, const RunConfig& cfg);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace cityplan

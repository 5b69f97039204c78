#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cityplan/environment.hpp"
#include "cityplan/qnetwork.hpp"

namespace cityplan {

/// Fixed-capacity FIFO of transitions.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity = 50'000);

    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& operator[](std::size_t i) const { return items_[(head_ + i) % items_.size()]; }

    /// min(n, size()) distinct transitions drawn uniformly.
    std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // oldest element once full
    std::vector<Transition> items_;
};

struct TrainConfig {
    std::size_t batch_size = 64;
    double epsilon0 = 1.0;
    double epsilon_decay = 0.999;
    double epsilon_min = 0.01;
    double gamma = 0.9;
    double learning_rate = 1e-5;
    double momentum = 0.9;
    double dropout = 0.2;
    std::size_t episodes = 200;
    std::size_t replay_capacity = 50'000;
    std::uint64_t rng_seed = 0;
    QNetworkShape network;
};

/// epsilon after n episodes = max(epsilon_min, epsilon0 * decay^n).
class EpsilonSchedule {
public:
    EpsilonSchedule(double epsilon0, double decay, double minimum);
    double value() const { return at(episode_); }
    double at(std::size_t episode) const;
    void advance() { ++episode_; }
    std::size_t episode() const { return episode_; }

private:
    double epsilon0_, decay_, minimum_;
    std::size_t episode_ = 0;
};

/// Stochastic gradient descent with classical momentum.
class SgdMomentum {
public:
    SgdMomentum(double learning_rate, double momentum) : lr_(learning_rate), mu_(momentum) {}
    void apply(std::span<double> params, std::span<const double> grad);

private:
    double lr_, mu_;
    std::vector<double> velocity_;
};

/// One gradient update of `base` on `batch`; bootstrapped targets come from
/// `target` in eval mode. Returns the pre-update loss (0 for an empty batch).
double train_step(QNetwork& base, const QNetwork& target, std::span<const Transition* const> batch,
                  const TrainConfig& cfg, SgdMomentum& optimizer, Rng& rng);

void sync_target(const QNetwork& base, QNetwork& target);

struct EpisodeLog {
    std::size_t episode = 0;
    double epsilon = 0.0;
    double total_reward = 0.0;
    double mean_loss = 0.0;
};

struct TrainResult {
    QNetwork network;
    std::vector<EpisodeLog> log;
};

/// Deep Q-learning over a pool of maps: each episode picks a map uniformly,
/// acts epsilon-greedily, trains once per step, then decays epsilon and
/// syncs the target network. `initial` resumes from existing weights.
TrainResult train(const TrainConfig& cfg, const std::vector<std::shared_ptr<const CityMap>>& pool,
                  const EnvConfig& env_cfg, const ScoreWeights& weights,
                  std::optional<QNetwork> initial = std::nullopt);

/// CSV: episode,epsilon,total_reward,mean_loss with round-trip precision.
std::string training_log_csv(const std::vector<EpisodeLog>& log);

}  // namespace cityplan

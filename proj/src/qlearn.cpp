#include "cityplan/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cityplan/errors.hpp"
#include "cityplan/policies.hpp"

namespace cityplan {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ContractError("replay memory capacity must be positive");
}

void ReplayMemory::push(Transition t) {
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
        return;
    }
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayMemory::sample(std::size_t n, Rng& rng) const {
    n = std::min(n, items_.size());
    std::vector<std::size_t> picked;
    picked.reserve(n);
    // Floyd's algorithm: n distinct indices in O(n^2) worst case for small n
    const std::size_t total = items_.size();
    for (std::size_t j = total - n; j < total; ++j) {
        std::uniform_int_distribution<std::size_t> pick(0, j);
        const std::size_t t = pick(rng);
        if (std::find(picked.begin(), picked.end(), t) == picked.end()) picked.push_back(t);
        else picked.push_back(j);
    }
    std::vector<const Transition*> out;
    out.reserve(n);
    for (std::size_t i : picked) out.push_back(&items_[i]);
    return out;
}

EpsilonSchedule::EpsilonSchedule(double epsilon0, double decay, double minimum)
    : epsilon0_(epsilon0), decay_(decay), minimum_(minimum) {
    if (!(decay > 0.0 && decay <= 1.0)) throw ContractError("epsilon decay must lie in (0, 1]");
}

double EpsilonSchedule::at(std::size_t episode) const {
    return std::max(minimum_, epsilon0_ * std::pow(decay_, static_cast<double>(episode)));
}

void SgdMomentum::apply(std::span<double> params, std::span<const double> grad) {
    if (velocity_.size() != params.size()) velocity_.assign(params.size(), 0.0);
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity_[i] = mu_ * velocity_[i] - lr_ * grad[i];
        params[i] += velocity_[i];
    }
}

double train_step(QNetwork& base, const QNetwork& target, std::span<const Transition* const> batch,
                  const TrainConfig& cfg, SgdMomentum& optimizer, Rng& rng) {
    if (batch.empty()) return 0.0;
    std::vector<StateTensor> states;
    std::vector<Action> actions;
    std::vector<double> targets;
    states.reserve(batch.size());
    for (const Transition* t : batch) {
        double y = t->reward;
        if (!t->terminal && cfg.gamma != 0.0) {
            const QValues next = target.forward(t->next_state);
            y += cfg.gamma * *std::max_element(next.begin(), next.end());
        }
        states.push_back(t->state);
        actions.push_back(t->action);
        targets.push_back(y);
    }
    std::vector<double> grad(base.params().size());
    const double loss = base.loss_and_gradient(states, actions, targets, grad, cfg.dropout,
                                               cfg.dropout > 0.0 ? &rng : nullptr);
    optimizer.apply(base.params(), grad);
    return loss;
}

void sync_target(const QNetwork& base, QNetwork& target) { target = base; }

TrainResult train(const TrainConfig& cfg, const std::vector<std::shared_ptr<const CityMap>>& pool,
                  const EnvConfig& env_cfg, const ScoreWeights& weights, std::optional<QNetwork> initial) {
    if (pool.empty()) throw ContractError("training needs at least one map");
    if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) throw ContractError("gamma must lie in [0, 1]");
    if (cfg.batch_size == 0) throw ContractError("batch size must be positive");

    Rng rng(cfg.rng_seed);
    QNetworkShape shape = cfg.network;
    shape.K = env_cfg.K;
    QNetwork base = initial ? std::move(*initial) : QNetwork(shape, rng);
    if (base.shape().K != env_cfg.K)
        throw ShapeError("weights were trained with K=" + std::to_string(base.shape().K) + ", environment uses K=" +
                         std::to_string(env_cfg.K));
    QNetwork target = base;
    ReplayMemory memory(cfg.replay_capacity);
    SgdMomentum optimizer(cfg.learning_rate, cfg.momentum);
    EpsilonSchedule epsilon(cfg.epsilon0, cfg.epsilon_decay, cfg.epsilon_min);

    std::vector<Environment> envs;
    envs.reserve(pool.size());
    for (const auto& map : pool) envs.emplace_back(map, env_cfg, weights);

    std::vector<EpisodeLog> log;
    log.reserve(cfg.episodes);
    std::uniform_int_distribution<std::size_t> pick_map(0, pool.size() - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
        Environment& env = envs[pick_map(rng)];
        const double eps = epsilon.value();
        StateTensor obs = env.reset();
        double loss_sum = 0.0;
        std::size_t steps = 0;
        while (!env.terminal()) {
            const Action a = coin(rng) < eps ? random_select(rng) : learned_select(base, obs);
            auto result = env.step(a);
            memory.push({obs, a, result.reward, result.observation, result.terminal});
            obs = std::move(result.observation);
            const auto batch = memory.sample(cfg.batch_size, rng);
            loss_sum += train_step(base, target, batch, cfg, optimizer, rng);
            ++steps;
        }
        log.push_back({ep, eps, env.total(), steps ? loss_sum / static_cast<double>(steps) : 0.0});
        epsilon.advance();
        sync_target(base, target);
    }
    return {std::move(base), std::move(log)};
}

std::string training_log_csv(const std::vector<EpisodeLog>& log) {
    std::string out = "episode,epsilon,total_reward,mean_loss\n";
    char buf[128];
    for (const auto& e : log) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", e.episode, e.epsilon, e.total_reward, e.mean_loss);
        out += buf;
    }
    return out;
}

}  // namespace cityplan

#pragma once

#include <memory>

#include "cityplan/environment.hpp"
#include "cityplan/qnetwork.hpp"

namespace cityplan {

/// Tolerance under which two probed totals count as tied.
inline constexpr double greedy_tie_tolerance = 1e-9;

Action random_select(Rng& rng);

/// Action maximizing the immediate post-action total; ties are broken
/// uniformly at random.
Action greedy_select(Environment& env, Rng& rng);

/// Argmax of the network's eval-mode q-values, lowest index on ties.
Action learned_select(const QNetwork& net, const StateTensor& observation);
Action argmax_action(const QValues& q);

class RandomPolicy final : public Policy {
public:
    Action select(const StateTensor&, Environment&, Rng& rng) override { return random_select(rng); }
};

class GreedyPolicy final : public Policy {
public:
    Action select(const StateTensor&, Environment& env, Rng& rng) override { return greedy_select(env, rng); }
};

class LearnedPolicy final : public Policy {
public:
    explicit LearnedPolicy(std::shared_ptr<const QNetwork> net) : net_(std::move(net)) {}
    Action select(const StateTensor& observation, Environment&, Rng&) override {
        return learned_select(*net_, observation);
    }

private:
    std::shared_ptr<const QNetwork> net_;
};

}  // namespace cityplan

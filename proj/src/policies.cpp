#include "cityplan/policies.hpp"

#include <algorithm>

namespace cityplan {

Action random_select(Rng& rng) {
    std::uniform_int_distribution<int> pick(0, action_count - 1);
    return static_cast<Action>(pick(rng));
}

Action greedy_select(Environment& env, Rng& rng) {
    std::array<double, action_count> reward{};
    for (Action a : all_actions) reward[static_cast<std::size_t>(a)] = env.probe_reward(a);
    const double best = *std::max_element(reward.begin(), reward.end());

    std::array<Action, action_count> tied{};
    int n = 0;
    for (Action a : all_actions)
        if (reward[static_cast<std::size_t>(a)] >= best - greedy_tie_tolerance) tied[static_cast<std::size_t>(n++)] = a;
    if (n == 1) return tied[0];
    std::uniform_int_distribution<int> pick(0, n - 1);
    return tied[static_cast<std::size_t>(pick(rng))];
}

Action argmax_action(const QValues& q) {
    return static_cast<Action>(std::max_element(q.begin(), q.end()) - q.begin());
}

Action learned_select(const QNetwork& net, const StateTensor& observation) {
    return argmax_action(net.forward(observation));
}

}  // namespace cityplan

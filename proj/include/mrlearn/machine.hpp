#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrlearn/alphabet.hpp"
#include "mrlearn/traces.hpp"

namespace mrlearn {

class LabelingFunction;

/// Mealy Reward Machine: a finite-state transducer from observation
/// sequences to reward sequences. Transition and output functions are total
/// over nodes x alphabet; the null observation self-loops everywhere and
/// emits the default reward. Immutable after construction.
class MealyRewardMachine {
public:
    MealyRewardMachine(Alphabet alphabet, int startNode, double defaultReward,
                       std::vector<std::vector<int>> next,
                       std::vector<std::vector<double>> out);

    int numNodes() const { return static_cast<int>(next_.size()); }
    int start() const { return start_; }
    double defaultReward() const { return default_reward_; }
    const Alphabet& alphabet() const { return alphabet_; }

    int target(int node, ObsId z) const { return next_[checkNode(node)][checkObs(z)]; }
    double output(int node, ObsId z) const { return out_[checkNode(node)][checkObs(z)]; }

    /// One transducer step. null self-loops with the default reward.
    std::pair<int, double> step(int node, ObsId z) const;

    /// Node reached from `node` after reading `trace`.
    int walk(int node, const ObservationTrace& trace) const;

    /// Reward sequence produced by reading `trace` from the start node.
    RewardTrace run(const ObservationTrace& trace) const;

    std::string describe() const;

private:
    int checkNode(int node) const;
    int checkObs(ObsId z) const;

    Alphabet alphabet_;
    int start_;
    double default_reward_;
    std::vector<std::vector<int>> next_;   // [node][symbol]
    std::vector<std::vector<double>> out_; // [node][symbol]
};

/// Incremental construction with edge defaults: any (node, symbol) pair left
/// unspecified becomes a zero-reward self-loop.
class MachineBuilder {
public:
    MachineBuilder(Alphabet alphabet, int numNodes, int startNode, double defaultReward);

    MachineBuilder& edge(int from, const std::string& symbol, int to, double reward);
    MachineBuilder& edge(int from, ObsId symbol, int to, double reward);

    MealyRewardMachine build() const;

private:
    Alphabet alphabet_;
    int num_nodes_;
    int start_;
    double default_reward_;
    std::vector<std::vector<int>> next_;
    std::vector<std::vector<double>> out_;
};

/// Rewards an MRM assigns to a history under a labeling function; equals
/// run() on the induced observation trace.
RewardTrace rewardsOfHistory(const MealyRewardMachine& machine, const LabelingFunction& labeling,
                             const History& history);

/// Language equivalence of two machines over the shared alphabet (null
/// included). Returns a shortest distinguishing observation trace, or
/// nullopt when the machines agree on every input sequence.
std::optional<ObservationTrace> equivalent(const MealyRewardMachine& m1,
                                           const MealyRewardMachine& m2,
                                           double tolerance = 1e-9);

} // namespace mrlearn

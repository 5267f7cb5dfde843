#pragma once

#include <map>
#include <utility>
#include <vector>

#include "mrlearn/machine.hpp"
#include "mrlearn/mdp.hpp"

namespace mrlearn {

/// Synchronized product of an nrMDP and an MRM under a labeling function:
/// an immediate-reward MDP over the reachable part of S x U. The reward of
/// a transition into (s', u') via a is the machine output read at the source
/// node with the observation of the entered MDP state: delta_r(u, lambda(a, s')).
struct ProductMdp {
    struct Succ {
        int target;     // product state index
        double prob;
        double reward;  // reward carried by this transition
    };

    std::vector<std::pair<int, int>> states;  // index -> (mdp state, machine node)
    int initial = 0;
    int num_actions = 0;
    std::vector<std::vector<std::vector<Succ>>> trans;  // [pstate][action] -> successors

    int numStates() const { return static_cast<int>(states.size()); }

    bool defined(int ps, int a) const {
        return !trans[static_cast<size_t>(ps)][static_cast<size_t>(a)].empty();
    }

    const std::vector<Succ>& row(int ps, int a) const {
        return trans[static_cast<size_t>(ps)][static_cast<size_t>(a)];
    }

    /// Index of product state (s, u), or -1 if unreachable.
    int indexOf(int s, int u) const {
        auto it = index_.find({s, u});
        return it == index_.end() ? -1 : it->second;
    }

    std::map<std::pair<int, int>, int> index_;
};

/// Builds the reachable product from (s0, u0). Throws AlphabetMismatch when
/// the labeling emits a symbol the machine's alphabet does not know.
ProductMdp product(const NrMdp& m, const LabelingFunction& lab, const MealyRewardMachine& rm);

} // namespace mrlearn

#pragma once

#include <cstddef>
#include <vector>

#include "mrlearn/alphabet.hpp"
#include "mrlearn/errors.hpp"

namespace mrlearn {

using ObservationTrace = std::vector<ObsId>;
using RewardTrace = std::vector<double>;

/// A history s0 a0 s1 a1 ... sk: k action-state pairs after the initial state.
struct History {
    std::vector<int> states;   // length k+1
    std::vector<int> actions;  // length k

    size_t length() const { return actions.size(); }

    void checkWellFormed() const {
        if (states.size() != actions.size() + 1)
            throw MalformedHistory("history must alternate state/action and end in a state");
    }
};

/// An interaction trace s0 a0 r1 s1 a1 r2 ... : reward r_i is received on
/// entering s_i via a_{i-1}.
struct InteractionTrace {
    std::vector<int> states;    // length k+1
    std::vector<int> actions;   // length k
    RewardTrace rewards;        // length k

    size_t length() const { return actions.size(); }

    void checkWellFormed() const {
        if (states.empty())
            throw MalformedTrace("interaction trace needs an initial state");
        if (actions.size() != rewards.size() || states.size() != actions.size() + 1)
            throw MalformedTrace("interaction trace has mismatched action/reward/state counts");
    }

    void push(int action, double reward, int nextState) {
        actions.push_back(action);
        rewards.push_back(reward);
        states.push_back(nextState);
    }

    History history() const {
        return History{states, actions};
    }
};

/// dSum^gamma(r1..rk) = sum_i gamma^i * r_i, discount exponent starting at 1.
inline double discountedSum(const RewardTrace& trace, double gamma) {
    double acc = 0.0;
    double g = 1.0;
    for (double r : trace) {
        g *= gamma;
        acc += g * r;
    }
    return acc;
}

/// MP(r1..rk) = (1/k) sum_i r_i.
inline double meanPayoff(const RewardTrace& trace) {
    if (trace.empty()) throw EmptyTrace("mean payoff of an empty reward trace");
    double acc = 0.0;
    for (double r : trace) acc += r;
    return acc / static_cast<double>(trace.size());
}

} // namespace mrlearn

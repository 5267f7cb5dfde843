#pragma once

#include <string>
#include <vector>

#include "mrlearn/product.hpp"

namespace mrlearn {

/// Memoryless policy on a product MDP: one action per reachable state.
struct Strategy {
    std::vector<int> choice;  // [product state] -> action

    int action(int ps) const { return choice[static_cast<size_t>(ps)]; }
};

struct ValueFunction {
    std::vector<double> value;  // [product state]

    double at(int ps) const { return value[static_cast<size_t>(ps)]; }
};

struct SolveResult {
    ValueFunction values;
    Strategy strategy;
    int sweeps = 0;
};

/// Discounted-sum value iteration. The fixed point satisfies
///   V(p) = max_a gamma * sum_succ prob * (reward + V(succ)),
/// i.e. V(s0,u0) is the expected dSum with discount exponents starting at 1.
/// Greedy ties break toward the lowest action index. Throws InvalidGamma,
/// EmptyModel, IterationLimit.
SolveResult valueIteration(const ProductMdp& p, double gamma, double tol = 1e-8,
                           long long maxSweeps = 1000000);

/// Fixed-policy evaluation under the same discounting convention.
/// Throws PartialStrategy when the strategy misses a reachable state or
/// picks an undefined action.
ValueFunction evaluatePolicy(const ProductMdp& p, const Strategy& strat, double gamma,
                             double tol = 1e-8, long long maxSweeps = 1000000);

/// One "state -> action" line per reachable product state.
std::string exportStrategy(const ProductMdp& p, const Strategy& strat, const NrMdp& mdp);

} // namespace mrlearn

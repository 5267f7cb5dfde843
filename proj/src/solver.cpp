#include "mrlearn/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mrlearn {

namespace {

double backup(const ProductMdp& p, int ps, int a, const std::vector<double>& v, double gamma) {
    double acc = 0.0;
    for (const auto& succ : p.row(ps, a))
        acc += succ.prob * (succ.reward + v[static_cast<size_t>(succ.target)]);
    return gamma * acc;
}

} // namespace

SolveResult valueIteration(const ProductMdp& p, double gamma, double tol, long long maxSweeps) {
    if (p.numStates() == 0) throw EmptyModel("value iteration on an empty product");
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidGamma("gamma must lie in (0, 1)");
    if (!(tol > 0.0)) throw InvalidGamma("tolerance must be positive");

    std::vector<double> v(static_cast<size_t>(p.numStates()), 0.0);
    std::vector<double> next(v.size(), 0.0);
    int sweeps = 0;
    for (long long iter = 0; iter < maxSweeps; ++iter) {
        double residual = 0.0;
        for (int ps = 0; ps < p.numStates(); ++ps) {
            double best = 0.0;  // states with no defined action keep value 0
            bool any = false;
            for (int a = 0; a < p.num_actions; ++a) {
                if (!p.defined(ps, a)) continue;
                double q = backup(p, ps, a, v, gamma);
                if (!any || q > best) best = q;
                any = true;
            }
            next[static_cast<size_t>(ps)] = best;
            residual = std::max(residual, std::abs(best - v[static_cast<size_t>(ps)]));
        }
        v.swap(next);
        ++sweeps;
        if (residual < tol) {
            SolveResult result;
            result.values.value = v;
            result.sweeps = sweeps;
            // greedy strategy, ties to the lowest action index
            result.strategy.choice.assign(static_cast<size_t>(p.numStates()), -1);
            for (int ps = 0; ps < p.numStates(); ++ps) {
                double best = -std::numeric_limits<double>::infinity();
                int arg = -1;
                for (int a = 0; a < p.num_actions; ++a) {
                    if (!p.defined(ps, a)) continue;
                    double q = backup(p, ps, a, v, gamma);
                    if (q > best) {
                        best = q;
                        arg = a;
                    }
                }
                result.strategy.choice[static_cast<size_t>(ps)] = arg;
            }
            return result;
        }
    }
    throw IterationLimit("value iteration did not converge within the sweep cap");
}

ValueFunction evaluatePolicy(const ProductMdp& p, const Strategy& strat, double gamma,
                             double tol, long long maxSweeps) {
    if (p.numStates() == 0) throw EmptyModel("policy evaluation on an empty product");
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidGamma("gamma must lie in (0, 1)");
    if (strat.choice.size() != static_cast<size_t>(p.numStates()))
        throw PartialStrategy("strategy does not cover the reachable product states");
    for (int ps = 0; ps < p.numStates(); ++ps) {
        int a = strat.choice[static_cast<size_t>(ps)];
        bool anyDefined = false;
        for (int b = 0; b < p.num_actions; ++b) anyDefined = anyDefined || p.defined(ps, b);
        if (!anyDefined) continue;  // dead ends are valued 0 under any policy
        if (a < 0 || a >= p.num_actions || !p.defined(ps, a))
            throw PartialStrategy("strategy picks an undefined action in state " +
                                  std::to_string(ps));
    }

    std::vector<double> v(static_cast<size_t>(p.numStates()), 0.0);
    std::vector<double> next(v.size(), 0.0);
    for (long long iter = 0; iter < maxSweeps; ++iter) {
        double residual = 0.0;
        for (int ps = 0; ps < p.numStates(); ++ps) {
            int a = strat.choice[static_cast<size_t>(ps)];
            double val = (a >= 0 && p.defined(ps, a)) ? backup(p, ps, a, v, gamma) : 0.0;
            next[static_cast<size_t>(ps)] = val;
            residual = std::max(residual, std::abs(val - v[static_cast<size_t>(ps)]));
        }
        v.swap(next);
        if (residual < tol) return ValueFunction{v};
    }
    throw IterationLimit("policy evaluation did not converge within the sweep cap");
}

std::string exportStrategy(const ProductMdp& p, const Strategy& strat, const NrMdp& mdp) {
    std::ostringstream os;
    for (int ps = 0; ps < p.numStates(); ++ps) {
        auto [s, u] = p.states[static_cast<size_t>(ps)];
        int a = strat.choice[static_cast<size_t>(ps)];
        os << "(" << mdp.state_names[static_cast<size_t>(s)] << ", u" << u << ") -> "
           << (a >= 0 ? mdp.action_names[static_cast<size_t>(a)] : std::string("-")) << "\n";
    }
    return os.str();
}

} // namespace mrlearn

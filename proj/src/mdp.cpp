#include "mrlearn/mdp.hpp"

#include <cmath>

namespace mrlearn {

void NrMdp::validate() const {
    const int n = numStates();
    const int na = numActions();
    if (n == 0) throw ModelInvalid("MDP has no states");
    if (na == 0) throw ModelInvalid("MDP has no actions");
    if (initial < 0 || initial >= n) throw ModelInvalid("initial state out of range");
    if (trans.size() != static_cast<size_t>(n)) throw ModelInvalid("transition table size mismatch");
    for (int s = 0; s < n; ++s) {
        if (trans[static_cast<size_t>(s)].size() != static_cast<size_t>(na))
            throw ModelInvalid("transition table action count mismatch");
        for (int a = 0; a < na; ++a) {
            const auto& row = trans[static_cast<size_t>(s)][static_cast<size_t>(a)];
            if (row.empty()) continue;  // undefined action
            double mass = 0.0;
            for (auto [succ, p] : row) {
                if (succ < 0 || succ >= n)
                    throw ModelInvalid("successor out of range in state " + state_names[static_cast<size_t>(s)]);
                if (p < 0.0)
                    throw ModelInvalid("negative transition probability");
                mass += p;
            }
            if (std::abs(mass - 1.0) > 1e-9)
                throw ModelInvalid("row (" + state_names[static_cast<size_t>(s)] + ", " +
                                   action_names[static_cast<size_t>(a)] + ") sums to " +
                                   std::to_string(mass));
        }
    }
}

int sampleTransition(const NrMdp& m, int s, int a, std::mt19937_64& rng) {
    if (!m.defined(s, a))
        throw UndefinedAction("no distribution for (" + std::to_string(s) + ", " +
                              std::to_string(a) + ")");
    const auto& row = m.row(s, a);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    double u = dist(rng);
    double acc = 0.0;
    for (auto [succ, p] : row) {
        acc += p;
        if (u < acc) return succ;
    }
    return row.back().first;  // numeric slack lands on the last successor
}

ObservationTrace extractObsTrace(const InteractionTrace& t, const LabelingFunction& lab) {
    t.checkWellFormed();
    ObservationTrace out;
    out.reserve(t.length());
    for (size_t i = 0; i < t.length(); ++i)
        out.push_back(lab(t.actions[i], t.states[i + 1]));
    return out;
}

RewardTrace extractRewTrace(const InteractionTrace& t) {
    t.checkWellFormed();
    return t.rewards;
}

} // namespace mrlearn

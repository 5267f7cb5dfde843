#pragma once

#include <random>
#include <string>
#include <vector>

#include "mrlearn/alphabet.hpp"
#include "mrlearn/errors.hpp"
#include "mrlearn/traces.hpp"

namespace mrlearn {

/// Non-rewarding MDP: finite states and actions, sparse transition
/// distributions, an initial state. Immutable once validated.
struct NrMdp {
    std::vector<std::string> state_names;
    std::vector<std::string> action_names;
    int initial = 0;
    // trans[s][a] = list of (successor, probability); empty list = action
    // undefined in that state. Successor order is fixed at construction and
    // preserved through the product so seeded sampling aligns trace-by-trace.
    std::vector<std::vector<std::vector<std::pair<int, double>>>> trans;

    int numStates() const { return static_cast<int>(state_names.size()); }
    int numActions() const { return static_cast<int>(action_names.size()); }

    bool defined(int s, int a) const {
        return s >= 0 && s < numStates() && a >= 0 && a < numActions() &&
               !trans[static_cast<size_t>(s)][static_cast<size_t>(a)].empty();
    }

    const std::vector<std::pair<int, double>>& row(int s, int a) const {
        return trans[static_cast<size_t>(s)][static_cast<size_t>(a)];
    }

    /// Checks row stochasticity (sum 1 within 1e-9, nonnegative entries),
    /// successor validity, and the initial state. Throws ModelInvalid.
    void validate() const;
};

/// Total map (action, entered state) -> observation in Z + {null}.
class LabelingFunction {
public:
    LabelingFunction() = default;
    LabelingFunction(Alphabet alphabet, int numActions, int numStates)
        : alphabet_(std::move(alphabet)),
          obs_(static_cast<size_t>(numActions),
               std::vector<ObsId>(static_cast<size_t>(numStates), kNullObs)) {}

    const Alphabet& alphabet() const { return alphabet_; }

    void set(int action, int state, ObsId z) {
        if (z != kNullObs && !alphabet_.validId(z))
            throw UnknownObservation("labeling assigns an id outside the alphabet");
        obs_[static_cast<size_t>(action)][static_cast<size_t>(state)] = z;
    }
    void set(int action, int state, const std::string& symbol) {
        set(action, state, symbol == nullObsName() ? kNullObs : alphabet_.id(symbol));
    }

    ObsId operator()(int action, int state) const {
        return obs_[static_cast<size_t>(action)][static_cast<size_t>(state)];
    }

    int numActions() const { return static_cast<int>(obs_.size()); }
    int numStates() const { return obs_.empty() ? 0 : static_cast<int>(obs_[0].size()); }

private:
    Alphabet alphabet_;
    std::vector<std::vector<ObsId>> obs_;
};

/// Samples s' ~ T(s, a, .). Deterministic given the rng state: a single
/// uniform draw resolved by cumulative scan over the stored successor order.
int sampleTransition(const NrMdp& m, int s, int a, std::mt19937_64& rng);

/// Observation trace induced by an interaction trace: obs i = lambda(a_{i-1}, s_i).
ObservationTrace extractObsTrace(const InteractionTrace& t, const LabelingFunction& lab);

/// Reward trace recorded in an interaction trace.
RewardTrace extractRewTrace(const InteractionTrace& t);

} // namespace mrlearn

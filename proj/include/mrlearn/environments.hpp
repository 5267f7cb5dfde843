#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "mrlearn/machine.hpp"
#include "mrlearn/mdp.hpp"

namespace mrlearn {

/// A benchmark world: dynamics and labeling are known to the agent, the
/// reward machine is hidden behind a Session.
struct Domain {
    NrMdp mdp;
    LabelingFunction labeling;
    MealyRewardMachine hidden;
};

/// Rectangular gridworld parsed from the ASCII map format: one row per
/// line, '.' open/null cell, '#' wall, 'S' start, other characters labeled
/// through the legend block.
struct GridSpec {
    int width = 0;
    int height = 0;
    std::vector<std::string> rows;               // raw cell characters
    std::map<char, std::string> legend;          // cell char -> observation symbol
    int start_x = 0;
    int start_y = 0;

    bool open(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height &&
               rows[static_cast<size_t>(y)][static_cast<size_t>(x)] != '#';
    }
};

GridSpec gridFromAscii(const std::string& text);

/// Movement MDP of a grid: actions north/east/south/west, moves succeed
/// with probability apf and leave the agent in place otherwise; blocked
/// moves stay put with probability 1. Labels are observed on the entered
/// (or re-entered) cell.
std::pair<NrMdp, LabelingFunction> gridMdp(const GridSpec& spec, double apf,
                                           const Alphabet& alphabet);

/// The canonical Treasure-Map world. defaultReward is the cost c emitted on
/// null observations (the benchmark runs use -1).
Domain buildTreasureMap(double apf, double defaultReward = -1.0);

const std::string& treasureMapAscii();
MealyRewardMachine treasureMachine(double defaultReward = -1.0);

/// The Cookie domain: three rooms joined by a hallway, a button that
/// re-places a cookie uniformly in the blue or red room, an explicit eat
/// action that turns the cookie into crumbs observed at the eat step.
Domain buildCookieDomain();

MealyRewardMachine cookieMachine();

/// Resettable interaction handle over a domain. Owns the trial's RNG and
/// the hidden machine's runtime node; learning code sees rewards only
/// through step().
class Session {
public:
    Session(const Domain& domain, std::uint64_t seed);

    struct Outcome {
        int state;
        ObsId obs;
        double reward;
    };

    /// Restores the environment to s0 and the hidden machine to u0.
    void reset();

    Outcome step(int action);

    /// Jump the agent to an arbitrary state without resetting the machine.
    void teleport(int state);

    int state() const { return state_; }
    long long actionCount() const { return actions_; }
    long long resetCount() const { return resets_; }
    std::mt19937_64& rng() { return rng_; }

    const NrMdp& mdp() const { return domain_->mdp; }
    const LabelingFunction& labeling() const { return domain_->labeling; }

    /// Instrumentation for tests; learning code must not consult this.
    int hiddenNode() const { return node_; }

private:
    const Domain* domain_;
    std::mt19937_64 rng_;
    int state_;
    int node_;
    long long actions_ = 0;
    long long resets_ = 0;
};

} // namespace mrlearn

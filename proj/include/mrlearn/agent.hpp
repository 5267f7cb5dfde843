#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mrlearn/environments.hpp"
#include "mrlearn/lstar.hpp"
#include "mrlearn/solver.hpp"

namespace mrlearn {

/// Action selection while chasing observations and exploiting.
enum class ExplorationMode { Random, Mcts };

struct MctsConfig {
    int simulation_depth = 30;
    int trajectories_per_action = 100;
    double exploration_constant = 1.4142135623730951;
    double step_penalty = 1.0;        // x: charged per null step
    double observation_stake = 10.0;  // y: lost on a wrong observation, gained on the target
};

struct LearnerConfig {
    double theta = -1e100;        // exploitation gate for the optimal driver
    bool dynamic_theta = false;   // theta = rho + beta * rho_dot, tracked over epochs
    double beta = 0.5;
    double gamma = 0.95;
    int k = 6;                    // exploitation observation-sequence length
    long long acts_to_exploit = 2000;  // exploitation action budget per trial / reset window
    long long mq_action_budget = 1000; // actions per membership-query attempt
    long long mq_max_attempts = 100000;
    double arbitrary_reward = 0.0;     // filled in for unanswerable queries
    int ct_bound = 5;                  // assumed bound on hidden machine nodes
    int ct_budget = 500;               // conformance test queries
    MctsConfig mcts;
    double row_tolerance = 0.0;
    double vi_tol = 1e-8;
};

struct ExperimentLog {
    double total_return = 0.0;
    long long mq_attempts = 0;
    long long counterexamples = 0;
    double learn_seconds = 0.0;
    double exploit_seconds = 0.0;
    long long epochs = 0;
    std::vector<int> hypothesis_nodes;  // node count of each hypothesis built
};

/// True when the exact non-null observation sequence can be produced from
/// the initial state with positive probability (the agent knows T and
/// lambda, so unanswerable queries are decidable up front).
bool feasibleObservationSequence(const NrMdp& mdp, const LabelingFunction& lab,
                                 const ObservationTrace& query);

/// Remembers query answers; answers to a query also answer every prefix.
class QueryCache {
public:
    const RewardTrace* lookup(const ObservationTrace& query) const;
    bool knownUnanswerable(const ObservationTrace& query) const;
    void store(const ObservationTrace& query, const RewardTrace& rewards);
    void markUnanswerable(const ObservationTrace& query);
    size_t size() const { return answers_.size(); }

private:
    std::map<ObservationTrace, RewardTrace> answers_;
    std::set<ObservationTrace> unanswerable_;
};

struct Experience {
    bool answered = false;
    RewardTrace rewards;            // one reward per query symbol when answered
    long long attempts = 0;         // chase attempts consumed
    long long actions = 0;          // environment actions consumed
    InteractionTrace trace;         // the successful attempt, when answered
};

/// Answers a membership query by resetting and chasing the queried
/// observations in order. An attempt aborts on any wrong non-null
/// observation; infeasible queries return unanswered immediately.
Experience getExperience(Session& session, const ObservationTrace& query,
                         const LearnerConfig& cfg, ExplorationMode mode);

/// One planned action toward the next wanted observation. Shaped rollout
/// rewards: -x per null step, -y on a wrong observation, +y on the target;
/// rollouts stop at the first non-null observation.
int mctsPlan(const NrMdp& mdp, const LabelingFunction& lab, ObsId targetObs, int state,
             const MctsConfig& cfg, std::mt19937_64& rng);

/// Exhaustive search over Z^k for the observation sequence with the highest
/// reward sum along the hypothesis run; lexicographic tie-break in symbol
/// declaration order.
ObservationTrace getGoodObsSeq(const MealyRewardMachine& hyp, int k);

/// Equivalence-query surrogate: up to ctBudget observation-chasing test
/// queries (hypothesis transition cover plus random tails). Returns the
/// first interaction trace whose rewards contradict the hypothesis.
std::optional<InteractionTrace> conformanceTest(Session& session, const MealyRewardMachine& hyp,
                                                const LearnerConfig& cfg, ExplorationMode mode);

struct ApproximateResult {
    MealyRewardMachine machine;
    ExperimentLog log;
};

/// Approximate active learning: alternate answering membership queries with
/// exploiting the current hypothesis (good-observation-sequence chasing from
/// random starts), feeding experienced counterexamples back into the table.
ApproximateResult runApproximateActiveLearning(Session& session, const LearnerConfig& cfg,
                                               ExplorationMode mode);

struct OptimalResult {
    MealyRewardMachine machine;
    ProductMdp product;
    Strategy strategy;
    ValueFunction values;
    ExperimentLog log;
};

/// Optimal active learning: plan on the synchronized product of the
/// hypothesis. Exploit the value-iteration strategy while its value clears
/// theta, resetting whenever a window of actions stays below theta;
/// otherwise try to refute the hypothesis by conformance testing.
OptimalResult runOptimalActiveLearning(Session& session, const LearnerConfig& cfg,
                                       ExplorationMode mode, long long maxExploitActions);

} // namespace mrlearn

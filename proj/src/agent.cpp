#include "mrlearn/agent.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

namespace mrlearn {

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Chase graph for a query: completable[s][i] says the remaining suffix
// query[i..] can still be realized from state s without a stray observation.
struct ChaseGraph {
    std::vector<std::vector<char>> completable;  // [state][progress]
    bool feasible = false;
};

ChaseGraph buildChaseGraph(const NrMdp& mdp, const LabelingFunction& lab,
                           const ObservationTrace& query) {
    const int n = mdp.numStates();
    const size_t k = query.size();
    ChaseGraph g;
    g.completable.assign(static_cast<size_t>(n), std::vector<char>(k + 1, 0));
    for (int s = 0; s < n; ++s) g.completable[static_cast<size_t>(s)][k] = 1;

    for (size_t layer = k; layer-- > 0;) {
        // within-layer fixpoint: null steps stay in the layer
        bool changed = true;
        while (changed) {
            changed = false;
            for (int s = 0; s < n; ++s) {
                if (g.completable[static_cast<size_t>(s)][layer]) continue;
                bool ok = false;
                for (int a = 0; a < mdp.numActions() && !ok; ++a) {
                    if (!mdp.defined(s, a)) continue;
                    for (auto [succ, p] : mdp.row(s, a)) {
                        if (p <= 0.0) continue;
                        ObsId z = lab(a, succ);
                        if (z == kNullObs && g.completable[static_cast<size_t>(succ)][layer]) {
                            ok = true;
                            break;
                        }
                        if (z == query[layer] &&
                            g.completable[static_cast<size_t>(succ)][layer + 1]) {
                            ok = true;
                            break;
                        }
                    }
                }
                if (ok) {
                    g.completable[static_cast<size_t>(s)][layer] = 1;
                    changed = true;
                }
            }
        }
    }
    g.feasible = g.completable[static_cast<size_t>(mdp.initial)][0] != 0;
    return g;
}

struct ChaseHooks {
    double* last_null_reward = nullptr;
    bool* saw_null_reward = nullptr;
    QueryCache* cache = nullptr;
};

Experience chaseObservations(Session& session, const ObservationTrace& query,
                             const LearnerConfig& cfg, ExplorationMode mode,
                             const ChaseHooks& hooks) {
    Experience exp;
    if (query.empty()) {
        session.reset();
        exp.answered = true;
        exp.trace.states = {session.state()};
        return exp;
    }
    ChaseGraph graph = buildChaseGraph(session.mdp(), session.labeling(), query);
    if (!graph.feasible) return exp;

    // Random exploration still knows the model: choose uniformly among the
    // actions that keep the chase alive (some outcome stays on course).
    // Without this, queries more than a few observations long are
    // unreachable by rejection sampling.
    const NrMdp& mdp = session.mdp();
    const LabelingFunction& lab = session.labeling();
    std::vector<int> allowed;
    auto pickViableAction = [&](int s, size_t progress) {
        allowed.clear();
        for (int a = 0; a < mdp.numActions(); ++a) {
            if (!mdp.defined(s, a)) continue;
            for (auto [succ, p] : mdp.row(s, a)) {
                if (p <= 0.0) continue;
                ObsId z = lab(a, succ);
                bool keeps = (z == kNullObs &&
                              graph.completable[static_cast<size_t>(succ)][progress]) ||
                             (z == query[progress] &&
                              graph.completable[static_cast<size_t>(succ)][progress + 1]);
                if (keeps) {
                    allowed.push_back(a);
                    break;
                }
            }
        }
        if (allowed.empty()) return -1;
        std::uniform_int_distribution<int> pick(0, static_cast<int>(allowed.size()) - 1);
        return allowed[static_cast<size_t>(pick(session.rng()))];
    };

    while (exp.attempts < cfg.mq_max_attempts) {
        ++exp.attempts;
        session.reset();
        InteractionTrace trace;
        trace.states = {session.state()};
        RewardTrace events;
        size_t progress = 0;
        long long actionsThisAttempt = 0;
        bool aborted = false;
        while (progress < query.size()) {
            if (!graph.completable[static_cast<size_t>(session.state())][progress]) {
                aborted = true;  // this attempt can no longer realize the query
                break;
            }
            if (actionsThisAttempt >= cfg.mq_action_budget) {
                aborted = true;
                break;
            }
            int a = mode == ExplorationMode::Mcts
                        ? mctsPlan(session.mdp(), session.labeling(), query[progress],
                                   session.state(), cfg.mcts, session.rng())
                        : pickViableAction(session.state(), progress);
            if (a < 0) {
                aborted = true;
                break;
            }
            auto out = session.step(a);
            ++actionsThisAttempt;
            ++exp.actions;
            trace.push(a, out.reward, out.state);
            if (out.obs == kNullObs) {
                if (hooks.last_null_reward) {
                    *hooks.last_null_reward = out.reward;
                    if (hooks.saw_null_reward) *hooks.saw_null_reward = true;
                }
                continue;
            }
            if (out.obs == query[progress]) {
                events.push_back(out.reward);
                ++progress;
                continue;
            }
            // Stray observation ruins the attempt, but the realized prefix
            // plus the stray is a faithfully answered query of its own.
            if (hooks.cache) {
                ObservationTrace realized(query.begin(),
                                          query.begin() + static_cast<long>(progress));
                realized.push_back(out.obs);
                RewardTrace strayAnswer = events;
                strayAnswer.push_back(out.reward);
                hooks.cache->store(realized, strayAnswer);
            }
            aborted = true;
            break;
        }
        if (!aborted && progress == query.size()) {
            exp.answered = true;
            exp.rewards = events;
            exp.trace = std::move(trace);
            if (hooks.cache) hooks.cache->store(query, exp.rewards);
            return exp;
        }
    }
    return exp;
}

std::vector<ObservationTrace> machineAccessSequences(const MealyRewardMachine& m) {
    std::vector<ObservationTrace> access(static_cast<size_t>(m.numNodes()));
    std::vector<char> seen(static_cast<size_t>(m.numNodes()), 0);
    std::deque<int> frontier;
    seen[static_cast<size_t>(m.start())] = 1;
    frontier.push_back(m.start());
    while (!frontier.empty()) {
        int u = frontier.front();
        frontier.pop_front();
        for (ObsId z = 0; z < m.alphabet().size(); ++z) {
            int v = m.target(u, z);
            if (seen[static_cast<size_t>(v)]) continue;
            seen[static_cast<size_t>(v)] = 1;
            access[static_cast<size_t>(v)] = access[static_cast<size_t>(u)];
            access[static_cast<size_t>(v)].push_back(z);
            frontier.push_back(v);
        }
    }
    return access;
}

bool tracesDiffer(const RewardTrace& a, const RewardTrace& b, double tol = 1e-9) {
    if (a.size() != b.size()) return true;
    for (size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return true;
    return false;
}

} // namespace

bool feasibleObservationSequence(const NrMdp& mdp, const LabelingFunction& lab,
                                 const ObservationTrace& query) {
    if (query.empty()) return true;
    return buildChaseGraph(mdp, lab, query).feasible;
}

const RewardTrace* QueryCache::lookup(const ObservationTrace& query) const {
    auto it = answers_.find(query);
    return it == answers_.end() ? nullptr : &it->second;
}

bool QueryCache::knownUnanswerable(const ObservationTrace& query) const {
    return unanswerable_.count(query) > 0;
}

void QueryCache::store(const ObservationTrace& query, const RewardTrace& rewards) {
    // an answer pins every prefix as well
    for (size_t len = 1; len <= query.size(); ++len) {
        ObservationTrace p(query.begin(), query.begin() + static_cast<long>(len));
        RewardTrace r(rewards.begin(), rewards.begin() + static_cast<long>(len));
        answers_.insert_or_assign(std::move(p), std::move(r));
    }
}

void QueryCache::markUnanswerable(const ObservationTrace& query) {
    unanswerable_.insert(query);
}

Experience getExperience(Session& session, const ObservationTrace& query,
                         const LearnerConfig& cfg, ExplorationMode mode) {
    return chaseObservations(session, query, cfg, mode, {});
}

namespace {

// Steps needed to produce observation z from each state, moving through
// null-labeled transitions only (support semantics; the model is known).
std::vector<int> observationDistance(const NrMdp& mdp, const LabelingFunction& lab, ObsId z) {
    const int kInf = std::numeric_limits<int>::max();
    std::vector<int> dist(static_cast<size_t>(mdp.numStates()), kInf);
    std::deque<int> frontier;
    for (int s = 0; s < mdp.numStates(); ++s)
        for (int a = 0; a < mdp.numActions() && dist[static_cast<size_t>(s)] == kInf; ++a) {
            if (!mdp.defined(s, a)) continue;
            for (auto [succ, p] : mdp.row(s, a))
                if (p > 0.0 && lab(a, succ) == z) {
                    dist[static_cast<size_t>(s)] = 1;
                    frontier.push_back(s);
                    break;
                }
        }
    // backward BFS over null-labeled support edges
    std::vector<std::vector<std::pair<int, int>>> preds(static_cast<size_t>(mdp.numStates()));
    for (int s = 0; s < mdp.numStates(); ++s)
        for (int a = 0; a < mdp.numActions(); ++a) {
            if (!mdp.defined(s, a)) continue;
            for (auto [succ, p] : mdp.row(s, a))
                if (p > 0.0 && lab(a, succ) == kNullObs) preds[static_cast<size_t>(succ)].emplace_back(s, a);
        }
    while (!frontier.empty()) {
        int s = frontier.front();
        frontier.pop_front();
        for (auto [prev, a] : preds[static_cast<size_t>(s)]) {
            (void)a;
            if (dist[static_cast<size_t>(prev)] != kInf) continue;
            dist[static_cast<size_t>(prev)] = dist[static_cast<size_t>(s)] + 1;
            frontier.push_back(prev);
        }
    }
    return dist;
}

} // namespace

int mctsPlan(const NrMdp& mdp, const LabelingFunction& lab, ObsId targetObs, int state,
             const MctsConfig& cfg, std::mt19937_64& rng) {
    const int numActions = mdp.numActions();
    struct Node {
        std::vector<long long> visits;
        std::vector<double> value;
        std::vector<std::map<int, int>> children;  // [action][next state] -> node
        long long total = 0;
        explicit Node(int na)
            : visits(static_cast<size_t>(na), 0),
              value(static_cast<size_t>(na), 0.0),
              children(static_cast<size_t>(na)) {}
    };
    std::vector<Node> nodes;
    nodes.emplace_back(numActions);

    std::uniform_int_distribution<int> pickAction(0, numActions - 1);
    auto stepReward = [&](ObsId z) {
        if (z == kNullObs) return -cfg.step_penalty;
        return z == targetObs ? cfg.observation_stake : -cfg.observation_stake;
    };

    // Rollouts follow a stray-averse greedy policy over the known model:
    // head for the nearest state that produces the target, never step onto a
    // wrong observation when an alternative exists. Uniform rollouts cannot
    // see targets more than a few steps out on these maps.
    const int kInf = std::numeric_limits<int>::max();
    std::vector<int> dist = observationDistance(mdp, lab, targetObs);
    std::uniform_real_distribution<double> uni01(0.0, 1.0);
    auto rolloutAction = [&](int s) {
        if (uni01(rng) < 0.15) return pickAction(rng);
        long long bestScore = std::numeric_limits<long long>::max();
        int best = -1;
        for (int a = 0; a < numActions; ++a) {
            if (!mdp.defined(s, a)) continue;
            long long score = std::numeric_limits<long long>::max();
            for (auto [succ, p] : mdp.row(s, a)) {
                if (p <= 0.0) continue;
                ObsId z = lab(a, succ);
                long long candidate;
                if (z == targetObs) candidate = 0;
                else if (z != kNullObs) continue;  // stray outcome
                else candidate = dist[static_cast<size_t>(succ)] == kInf
                                     ? std::numeric_limits<long long>::max()
                                     : dist[static_cast<size_t>(succ)];
                score = std::min(score, candidate);
            }
            if (score < bestScore) {
                bestScore = score;
                best = a;
            }
        }
        return best >= 0 ? best : pickAction(rng);
    };

    const long long budget =
        static_cast<long long>(cfg.trajectories_per_action) * numActions;
    for (long long iter = 0; iter < budget; ++iter) {
        int cur = 0;
        int s = state;
        int depth = 0;
        double ret = 0.0;
        bool terminal = false;
        std::vector<std::pair<int, int>> path;  // (node, action)

        while (!terminal && depth < cfg.simulation_depth) {
            // pick an untried action first (declaration order), else UCB
            int a = -1;
            for (int c = 0; c < numActions; ++c)
                if (mdp.defined(s, c) && nodes[static_cast<size_t>(cur)].visits[static_cast<size_t>(c)] == 0) {
                    a = c;
                    break;
                }
            if (a < 0) {
                double bestScore = -std::numeric_limits<double>::infinity();
                const Node& nd = nodes[static_cast<size_t>(cur)];
                for (int c = 0; c < numActions; ++c) {
                    if (!mdp.defined(s, c)) continue;
                    double mean = nd.value[static_cast<size_t>(c)] /
                                  static_cast<double>(nd.visits[static_cast<size_t>(c)]);
                    double score = mean + cfg.exploration_constant *
                                              std::sqrt(std::log(static_cast<double>(nd.total) + 1.0) /
                                                        static_cast<double>(nd.visits[static_cast<size_t>(c)]));
                    if (score > bestScore) {
                        bestScore = score;
                        a = c;
                    }
                }
            }
            if (a < 0) break;  // nothing defined here

            int next = sampleTransition(mdp, s, a, rng);
            ObsId z = lab(a, next);
            ++depth;
            ret += stepReward(z);
            path.emplace_back(cur, a);
            s = next;
            if (z != kNullObs) {
                terminal = true;
                break;
            }
            auto& kids = nodes[static_cast<size_t>(cur)].children[static_cast<size_t>(a)];
            auto it = kids.find(s);
            if (it == kids.end()) {
                int idx = static_cast<int>(nodes.size());
                nodes.emplace_back(numActions);
                nodes[static_cast<size_t>(cur)].children[static_cast<size_t>(a)].emplace(s, idx);
                // greedy stray-averse rollout from the new leaf
                while (depth < cfg.simulation_depth) {
                    int ra = rolloutAction(s);
                    if (!mdp.defined(s, ra)) continue;
                    int rs = sampleTransition(mdp, s, ra, rng);
                    ObsId rz = lab(ra, rs);
                    ++depth;
                    ret += stepReward(rz);
                    s = rs;
                    if (rz != kNullObs) break;
                }
                break;
            }
            cur = it->second;
        }

        for (auto [nodeIdx, action] : path) {
            Node& nd = nodes[static_cast<size_t>(nodeIdx)];
            nd.visits[static_cast<size_t>(action)] += 1;
            nd.value[static_cast<size_t>(action)] += ret;
            nd.total += 1;
        }
    }

    // root decision: highest mean return, ties to the lowest action index
    const Node& root = nodes[0];
    int best = 0;
    double bestMean = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < numActions; ++a) {
        if (root.visits[static_cast<size_t>(a)] == 0) continue;
        double mean = root.value[static_cast<size_t>(a)] /
                      static_cast<double>(root.visits[static_cast<size_t>(a)]);
        if (mean > bestMean) {
            bestMean = mean;
            best = a;
        }
    }
    return best;
}

ObservationTrace getGoodObsSeq(const MealyRewardMachine& hyp, int k) {
    if (k < 1) throw LengthMismatch("good observation sequence needs k >= 1");
    const int nz = hyp.alphabet().size();
    ObservationTrace current(static_cast<size_t>(k), 0);
    ObservationTrace best;
    double bestSum = -std::numeric_limits<double>::infinity();

    // depth-first in lexicographic symbol order; strict improvement keeps
    // the lexicographically-first maximizer
    struct Frame {
        int node;
        double sum;
    };
    std::vector<Frame> stack(static_cast<size_t>(k) + 1);
    stack[0] = {hyp.start(), 0.0};
    std::vector<int> choice(static_cast<size_t>(k), -1);
    int depth = 0;
    while (depth >= 0) {
        if (depth == k) {
            if (stack[static_cast<size_t>(k)].sum > bestSum) {
                bestSum = stack[static_cast<size_t>(k)].sum;
                best = current;
            }
            --depth;
            continue;
        }
        int& z = choice[static_cast<size_t>(depth)];
        ++z;
        if (z >= nz) {
            z = -1;
            --depth;
            continue;
        }
        current[static_cast<size_t>(depth)] = z;
        auto [nextNode, r] = hyp.step(stack[static_cast<size_t>(depth)].node, z);
        stack[static_cast<size_t>(depth) + 1] = {nextNode,
                                                 stack[static_cast<size_t>(depth)].sum + r};
        ++depth;
    }
    return best;
}

std::optional<InteractionTrace> conformanceTest(Session& session, const MealyRewardMachine& hyp,
                                                const LearnerConfig& cfg, ExplorationMode mode) {
    if (cfg.ct_budget <= 0) return std::nullopt;
    std::vector<ObservationTrace> access = machineAccessSequences(hyp);
    const int nz = hyp.alphabet().size();
    std::uniform_int_distribution<int> pickNode(0, hyp.numNodes() - 1);
    std::uniform_int_distribution<int> pickSymbol(0, nz - 1);
    std::uniform_int_distribution<int> pickTail(0, nz);

    for (int t = 0; t < cfg.ct_budget; ++t) {
        // transition-cover prefix plus a random tail; total length stays
        // within ctBound + |Z| when ctBound bounds the node count
        ObservationTrace query = access[static_cast<size_t>(pickNode(session.rng()))];
        query.push_back(pickSymbol(session.rng()));
        int tail = pickTail(session.rng());
        for (int i = 0; i < tail; ++i) query.push_back(pickSymbol(session.rng()));

        Experience e = getExperience(session, query, cfg, mode);
        if (!e.answered) continue;
        if (tracesDiffer(e.rewards, hyp.run(query))) return e.trace;
    }
    return std::nullopt;
}

namespace {

// Shared learning plumbing for the two drivers: the observation table, the
// query cache, answering queries through the environment, and
// counterexample shortening before ingestion.
class ActiveLearner {
public:
    ActiveLearner(Session& session, const LearnerConfig& cfg, ExplorationMode mode)
        : session_(session),
          cfg_(cfg),
          mode_(mode),
          table_(session.labeling().alphabet(), cfg.row_tolerance) {}

    void learnUntilComplete() {
        auto started = Clock::now();
        long long guard = 0;
        while (auto q = table_.getMQ()) {
            if (++guard > 10000000)
                throw IterationLimit("membership-query loop exceeded the sanity cap");
            table_.resolveMQ(*q, answerQuery(*q));
        }
        log_.learn_seconds += secondsSince(started);
    }

    RewardTrace answerQuery(const ObservationTrace& q) {
        if (const RewardTrace* hit = cache_.lookup(q)) return *hit;
        if (cache_.knownUnanswerable(q)) return arbitrary(q.size());
        ChaseHooks hooks{&last_null_reward_, &saw_null_reward_, &cache_};
        Experience e = chaseObservations(session_, q, cfg_, mode_, hooks);
        log_.mq_attempts += std::max<long long>(e.attempts, 1);
        if (!e.answered) {
            cache_.markUnanswerable(q);
            return arbitrary(q.size());
        }
        return e.rewards;
    }

    MealyRewardMachine buildHypothesis() {
        table_.setDefaultReward(saw_null_reward_ ? last_null_reward_ : 0.0);
        MealyRewardMachine hyp = table_.buildRewardMachine();
        log_.hypothesis_nodes.push_back(hyp.numNodes());
        return hyp;
    }

    /// Shorten an experienced counterexample before ingesting it: try
    /// access-prefix replacements from the divergence point backwards, so
    /// the suffixes entering E stay short enough to re-query.
    void ingestCounterexample(const MealyRewardMachine& hyp, const ObservationTrace& obs,
                              const RewardTrace& rew) {
        auto started = Clock::now();
        ++log_.counterexamples;
        const auto access = table_.accessSequences();
        const size_t d = obs.size();
        std::vector<int> nodeAt(d + 1);
        nodeAt[0] = hyp.start();
        for (size_t i = 0; i < d; ++i) nodeAt[i + 1] = hyp.step(nodeAt[i], obs[i]).first;

        for (size_t j = d; j >= 1; --j) {
            int node = nodeAt[j - 1];
            if (node < 0 || static_cast<size_t>(node) >= access.size()) break;
            ObservationTrace cand = access[static_cast<size_t>(node)];
            cand.insert(cand.end(), obs.begin() + static_cast<long>(j - 1), obs.end());
            if (cand.size() >= obs.size()) continue;
            RewardTrace answer = answerQuery(cand);
            if (tracesDiffer(answer, hyp.run(cand))) {
                table_.addCounterExample(cand, answer);
                log_.learn_seconds += secondsSince(started);
                return;
            }
        }
        table_.addCounterExample(obs, rew);
        log_.learn_seconds += secondsSince(started);
    }

    void observeNullReward(double r) {
        last_null_reward_ = r;
        saw_null_reward_ = true;
    }

    ExperimentLog& log() { return log_; }
    ObservationTable& table() { return table_; }

private:
    RewardTrace arbitrary(size_t len) const {
        return RewardTrace(len, cfg_.arbitrary_reward);
    }

    Session& session_;
    const LearnerConfig& cfg_;
    ExplorationMode mode_;
    ObservationTable table_;
    QueryCache cache_;
    ExperimentLog log_;
    double last_null_reward_ = 0.0;
    bool saw_null_reward_ = false;
};

} // namespace

ApproximateResult runApproximateActiveLearning(Session& session, const LearnerConfig& cfg,
                                               ExplorationMode mode) {
    auto trialStart = Clock::now();
    ActiveLearner learner(session, cfg, mode);
    learner.learnUntilComplete();
    MealyRewardMachine hyp = learner.buildHypothesis();

    const NrMdp& mdp = session.mdp();
    const LabelingFunction& lab = session.labeling();
    std::uniform_int_distribution<int> pickState(0, mdp.numStates() - 1);
    std::uniform_int_distribution<int> pickAction(0, mdp.numActions() - 1);

    long long actsExtd = 0;
    while (actsExtd < cfg.acts_to_exploit) {
        // exploitation round: align environment and machines at the start
        session.reset();
        int uH = hyp.start();
        ObservationTrace events;
        RewardTrace eventRewards;
        ObservationTrace goodSeq = getGoodObsSeq(hyp, cfg.k);
        bool ceIngested = false;

        while (actsExtd < cfg.acts_to_exploit && !ceIngested) {
            learner.log().epochs += 1;
            session.teleport(pickState(session.rng()));
            for (size_t leg = 0; leg < goodSeq.size() && !ceIngested; ++leg) {
                ObsId want = goodSeq[leg];
                for (;;) {
                    if (actsExtd >= cfg.acts_to_exploit) break;
                    int a = mode == ExplorationMode::Mcts
                                ? mctsPlan(mdp, lab, want, session.state(), cfg.mcts,
                                           session.rng())
                                : pickAction(session.rng());
                    auto out = session.step(a);
                    ++actsExtd;
                    learner.log().total_return += out.reward;
                    if (out.obs == kNullObs) {
                        learner.observeNullReward(out.reward);
                    } else {
                        double predicted = hyp.output(uH, out.obs);
                        events.push_back(out.obs);
                        eventRewards.push_back(out.reward);
                        if (std::abs(predicted - out.reward) > 1e-9) {
                            // counterexample; ingest only when found strictly
                            // within the exploitation budget
                            if (actsExtd < cfg.acts_to_exploit) {
                                learner.ingestCounterexample(hyp, events, eventRewards);
                                learner.learnUntilComplete();
                                hyp = learner.buildHypothesis();
                            }
                            ceIngested = true;
                            break;
                        }
                        uH = hyp.target(uH, out.obs);
                    }
                    if (out.obs == want) break;
                }
                if (actsExtd >= cfg.acts_to_exploit) break;
            }
        }
    }

    ExperimentLog log = learner.log();
    log.exploit_seconds = secondsSince(trialStart) - log.learn_seconds;
    return {std::move(hyp), std::move(log)};
}

OptimalResult runOptimalActiveLearning(Session& session, const LearnerConfig& cfg,
                                       ExplorationMode mode, long long maxExploitActions) {
    auto trialStart = Clock::now();
    ActiveLearner learner(session, cfg, mode);
    const NrMdp& mdp = session.mdp();
    const LabelingFunction& lab = session.labeling();

    double theta = cfg.theta;
    double rho = -std::numeric_limits<double>::infinity();
    double rhoPrev = -std::numeric_limits<double>::infinity();
    long long totalExploit = 0;
    int refuteRoundsWithoutCe = 0;

    learner.learnUntilComplete();
    MealyRewardMachine hyp = learner.buildHypothesis();
    ProductMdp prod = product(mdp, lab, hyp);
    SolveResult solved = valueIteration(prod, cfg.gamma, cfg.vi_tol);

    auto closeEpoch = [&](const RewardTrace& epochRewards) {
        double ret = discountedSum(epochRewards, cfg.gamma);
        if (ret > rho) {
            rhoPrev = rho;
            rho = ret;
        }
        if (cfg.dynamic_theta && rho > -std::numeric_limits<double>::infinity()) {
            double rhoDot =
                rhoPrev > -std::numeric_limits<double>::infinity() ? rho - rhoPrev : 0.0;
            theta = rho + cfg.beta * rhoDot;
        }
    };

    while (totalExploit < maxExploitActions) {
        session.reset();
        if (solved.values.at(prod.initial) >= theta) {
            refuteRoundsWithoutCe = 0;
            int uH = hyp.start();
            int ps = prod.initial;
            ObservationTrace events;
            RewardTrace eventRewards;
            RewardTrace epochRewards;
            long long epochActions = 0;
            learner.log().epochs += 1;
            bool ceIngested = false;

            while (totalExploit < maxExploitActions && !ceIngested) {
                int a = solved.strategy.action(ps);
                if (a < 0) break;  // dead end under the current model
                auto out = session.step(a);
                ++totalExploit;
                ++epochActions;
                learner.log().total_return += out.reward;
                epochRewards.push_back(out.reward);
                if (out.obs == kNullObs) {
                    learner.observeNullReward(out.reward);
                } else {
                    double predicted = hyp.output(uH, out.obs);
                    events.push_back(out.obs);
                    eventRewards.push_back(out.reward);
                    if (std::abs(predicted - out.reward) > 1e-9) {
                        learner.ingestCounterexample(hyp, events, eventRewards);
                        learner.learnUntilComplete();
                        hyp = learner.buildHypothesis();
                        prod = product(mdp, lab, hyp);
                        solved = valueIteration(prod, cfg.gamma, cfg.vi_tol);
                        ceIngested = true;
                        break;
                    }
                    uH = hyp.target(uH, out.obs);
                }
                ps = prod.indexOf(out.state, uH);

                if (discountedSum(epochRewards, cfg.gamma) < theta &&
                    epochActions >= cfg.acts_to_exploit) {
                    closeEpoch(epochRewards);
                    session.reset();
                    uH = hyp.start();
                    ps = prod.initial;
                    events.clear();
                    eventRewards.clear();
                    epochRewards.clear();
                    epochActions = 0;
                    learner.log().epochs += 1;
                }
            }
            if (!ceIngested) closeEpoch(epochRewards);
        } else {
            auto ce = conformanceTest(session, hyp, cfg, mode);
            if (ce) {
                ObservationTrace allObs = extractObsTrace(*ce, lab);
                RewardTrace allRew = extractRewTrace(*ce);
                ObservationTrace events;
                RewardTrace eventRewards;
                for (size_t i = 0; i < allObs.size(); ++i) {
                    if (allObs[i] == kNullObs) {
                        learner.observeNullReward(allRew[i]);
                        continue;
                    }
                    events.push_back(allObs[i]);
                    eventRewards.push_back(allRew[i]);
                }
                learner.ingestCounterexample(hyp, events, eventRewards);
                learner.learnUntilComplete();
                hyp = learner.buildHypothesis();
                prod = product(mdp, lab, hyp);
                solved = valueIteration(prod, cfg.gamma, cfg.vi_tol);
                refuteRoundsWithoutCe = 0;
            } else {
                // the hypothesis survived testing; if this keeps happening the
                // model cannot clear theta and the trial ends
                if (++refuteRoundsWithoutCe >= 3) break;
            }
        }
    }

    ExperimentLog log = learner.log();
    log.exploit_seconds = secondsSince(trialStart) - log.learn_seconds;
    return {std::move(hyp), std::move(prod), std::move(solved.strategy),
            std::move(solved.values), std::move(log)};
}

} // namespace mrlearn

// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier batches than the unit tests; expect a few minutes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <vector>

#include "mrlearn/agent.hpp"
#include "mrlearn/environments.hpp"
#include "mrlearn/experiment.hpp"

using namespace mrlearn;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s — %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
void cookieLearning() {
    RunConfig cfg;
    cfg.domain = DomainKind::Cookie;
    cfg.mode = RunMode::LearnRandom;
    cfg.trials = 10;
    cfg.seed = 7;
    BatchResult r = runBatch(cfg);
    int ok = 0;
    double seconds = 0.0;
    for (const auto& row : r.rows) {
        ok += row.learned_ok;
        seconds += row.learn_seconds + row.exploit_seconds;
    }
    double perTrial = seconds / static_cast<double>(r.rows.size());
    bool pass = ok == 10 && perTrial < 10.0;
    report(1, pass,
           "cookie random-exploration learning: " + std::to_string(ok) + "/10 learned, mean " +
               fmt(perTrial) + " s/trial (< 10 s required)");
}

// ------------------------------------------------------------ criteria 2 and 3
void treasureLearningAndExploitation() {
    const double apfs[3] = {0.75, 0.85, 0.95};
    int ok[3] = {0, 0, 0};
    double meanMqa[3] = {0, 0, 0};
    double meanReturn[3] = {0, 0, 0};
    for (int i = 0; i < 3; ++i) {
        RunConfig cfg;
        cfg.domain = DomainKind::Treasure;
        cfg.mode = RunMode::LearnMcts;
        cfg.apf = apfs[i];
        cfg.trials = 10;
        cfg.seed = 11;
        BatchResult r = runBatch(cfg);
        for (const auto& row : r.rows) {
            ok[i] += row.learned_ok;
            meanMqa[i] += static_cast<double>(row.mq_attempts);
            meanReturn[i] += row.ret;
        }
        meanMqa[i] /= 10.0;
        meanReturn[i] /= 10.0;
    }

    bool learnPass = ok[0] == 10 && ok[1] == 10 && ok[2] == 10 && meanMqa[0] <= 2000 &&
                     meanMqa[1] <= 2000 && meanMqa[2] <= 2000;
    std::ostringstream detail2;
    detail2 << "treasure learn-mcts: learned " << ok[0] << "/" << ok[1] << "/" << ok[2]
            << " of 10 at APF 0.75/0.85/0.95, mean #MQAs " << fmt(meanMqa[0]) << "/"
            << fmt(meanMqa[1]) << "/" << fmt(meanMqa[2]) << " (<= 2000 required)";
    report(2, learnPass, detail2.str());

    bool trendPass = meanReturn[0] < meanReturn[1] && meanReturn[1] < meanReturn[2] &&
                     meanReturn[2] > 0.0;
    std::ostringstream detail3;
    detail3 << "mean Return " << fmt(meanReturn[0]) << " < " << fmt(meanReturn[1]) << " < "
            << fmt(meanReturn[2]) << " rising with APF, Return(0.95) > 0";
    report(3, trendPass, detail3.str());
}

// ---------------------------------------------------------------- criterion 4
void lstarOracleEquivalence() {
    std::mt19937_64 rng(20260810);
    int learned = 0;
    bool eqBound = true, mqBound = true;
    for (int round = 0; round < 100; ++round) {
        std::uniform_int_distribution<int> pickNodes(1, 5), pickSymbols(1, 4);
        int n = pickNodes(rng);
        int nz = pickSymbols(rng);
        std::vector<std::string> symbols;
        for (int z = 0; z < nz; ++z) symbols.push_back("z" + std::to_string(z));
        Alphabet alphabet(symbols);
        std::uniform_int_distribution<int> pickTarget(0, n - 1), pickReward(0, 9);
        MachineBuilder b(alphabet, n, 0, 0.0);
        for (int u = 0; u < n; ++u)
            for (int z = 0; z < nz; ++z) b.edge(u, z, pickTarget(rng), pickReward(rng));
        MealyRewardMachine target = b.build();

        PerfectTeacherResult r = learnWithPerfectTeacher(target);
        if (!equivalent(r.machine, target).has_value()) ++learned;
        if (r.equivalenceQueries > target.numNodes()) eqBound = false;
        double zz = nz, nn = target.numNodes();
        double m = std::max<long long>(1, r.maxCounterexampleLength);
        if (static_cast<double>(r.membershipQueries) > 4.0 * (zz * zz + zz * m * nn * nn))
            mqBound = false;
    }
    bool pass = learned == 100 && eqBound && mqBound;
    report(4, pass,
           "perfect-teacher suite: " + std::to_string(learned) +
               "/100 equivalent, EQ <= n " + (eqBound ? "held" : "violated") +
               ", MQ <= 4(|Z|^2+|Z|mn^2) " + (mqBound ? "held" : "violated"));
}

// ---------------------------------------------------------------- criterion 5
void productTraceIdentity() {
    Domain d = buildTreasureMap(0.85);
    ProductMdp p = product(d.mdp, d.labeling, d.hidden);
    SolveResult solved = valueIteration(p, 0.95, 1e-9);

    int identical = 0;
    bool dsumsEqual = true;
    const int episodes = 1000, horizon = 120;
    for (int ep = 0; ep < episodes; ++ep) {
        std::uint64_t seed = 1000 + static_cast<std::uint64_t>(ep);
        std::mt19937_64 rngEnv(seed), rngProd(seed);
        int s = d.mdp.initial, u = d.hidden.start(), ps = p.initial;
        RewardTrace envR, prodR;
        for (int t = 0; t < horizon; ++t) {
            int a = solved.strategy.action(ps);
            int s2 = sampleTransition(d.mdp, s, a, rngEnv);
            ObsId z = d.labeling(a, s2);
            auto [u2, r] = d.hidden.step(u, z);
            envR.push_back(r);
            s = s2;
            u = u2;

            const auto& row = p.row(ps, a);
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            double draw = uni(rngProd), acc = 0.0;
            int target = row.back().target;
            double reward = row.back().reward;
            for (const auto& succ : row) {
                acc += succ.prob;
                if (draw < acc) {
                    target = succ.target;
                    reward = succ.reward;
                    break;
                }
            }
            prodR.push_back(reward);
            ps = target;
        }
        if (envR == prodR) ++identical;
        if (discountedSum(envR, 0.95) != discountedSum(prodR, 0.95)) dsumsEqual = false;
    }
    bool pass = identical == episodes && dsumsEqual;
    report(5, pass,
           "product simulation: " + std::to_string(identical) + "/1000 seeded episodes " +
               "trace-identical, dSum equal to machine precision " +
               (dsumsEqual ? "yes" : "no"));
}

// ---------------------------------------------------------------- criterion 6
void solverCorrectness() {
    // geometric closed form
    ProductMdp loop;
    loop.num_actions = 1;
    loop.states = {{0, 0}};
    loop.index_[{0, 0}] = 0;
    loop.trans = {{{{0, 1.0, 1.0}}}};
    loop.initial = 0;
    double v = valueIteration(loop, 0.5, 1e-12).values.at(0);
    bool geometric = std::abs(v - 1.0) < 1e-8;

    // brute-force strategy enumeration on random small products
    std::mt19937_64 rng(606);
    bool enumAgree = true;
    double worst = 0.0;
    for (int model = 0; model < 30; ++model) {
        std::uniform_int_distribution<int> pickStates(2, 4), pickNodes(1, 3);
        int ns = pickStates(rng), nu = pickNodes(rng);
        const int na = 2;
        NrMdp mdp;
        mdp.initial = 0;
        for (int s = 0; s < ns; ++s) mdp.state_names.push_back("s" + std::to_string(s));
        mdp.action_names = {"a", "b"};
        mdp.trans.assign(static_cast<size_t>(ns), {});
        std::uniform_int_distribution<int> pickState(0, ns - 1);
        std::uniform_real_distribution<double> uni(0.1, 1.0);
        for (int s = 0; s < ns; ++s) {
            mdp.trans[static_cast<size_t>(s)].assign(na, {});
            for (int a = 0; a < na; ++a) {
                int t1 = pickState(rng), t2 = pickState(rng);
                if (t1 == t2) {
                    mdp.trans[static_cast<size_t>(s)][static_cast<size_t>(a)] = {{t1, 1.0}};
                } else {
                    double w1 = uni(rng), w2 = uni(rng);
                    mdp.trans[static_cast<size_t>(s)][static_cast<size_t>(a)] = {
                        {t1, w1 / (w1 + w2)}, {t2, w2 / (w1 + w2)}};
                }
            }
        }
        mdp.validate();
        Alphabet alphabet({"p", "q"});
        LabelingFunction lab(alphabet, na, ns);
        std::uniform_int_distribution<int> pickObs(-1, 1);
        for (int a = 0; a < na; ++a)
            for (int s = 0; s < ns; ++s) {
                int o = pickObs(rng);
                lab.set(a, s, o < 0 ? kNullObs : o);
            }
        std::uniform_int_distribution<int> pickNode(0, nu - 1), pickReward(0, 5);
        MachineBuilder mb(alphabet, nu, 0, 0.0);
        for (int u = 0; u < nu; ++u)
            for (ObsId z = 0; z < 2; ++z) mb.edge(u, z, pickNode(rng), pickReward(rng));
        ProductMdp prod = product(mdp, lab, mb.build());

        const double gamma = 0.85;
        double viValue = valueIteration(prod, gamma, 1e-12).values.at(prod.initial);

        // enumerate all memoryless strategies; evaluate with an independent
        // fixed-point loop
        long long combos = 1;
        for (int i = 0; i < prod.numStates(); ++i) combos *= na;
        double best = -1e300;
        for (long long mask = 0; mask < combos; ++mask) {
            long long c = mask;
            std::vector<int> choice(static_cast<size_t>(prod.numStates()));
            for (int i = 0; i < prod.numStates(); ++i) {
                choice[static_cast<size_t>(i)] = static_cast<int>(c % na);
                c /= na;
            }
            std::vector<double> val(static_cast<size_t>(prod.numStates()), 0.0);
            for (int it = 0; it < 300; ++it) {
                std::vector<double> next(val.size(), 0.0);
                for (int psI = 0; psI < prod.numStates(); ++psI) {
                    int a = choice[static_cast<size_t>(psI)];
                    double acc = 0.0;
                    for (const auto& succ : prod.row(psI, a))
                        acc += succ.prob * (succ.reward + val[static_cast<size_t>(succ.target)]);
                    next[static_cast<size_t>(psI)] = gamma * acc;
                }
                val = next;
            }
            best = std::max(best, val[static_cast<size_t>(prod.initial)]);
        }
        worst = std::max(worst, std::abs(viValue - best));
        if (std::abs(viValue - best) > 1e-6) enumAgree = false;
    }
    report(6, geometric && enumAgree,
           "geometric closed form within 1e-8: " + std::string(geometric ? "yes" : "no") +
               "; strategy-enumeration gap on 30 random products: " + fmt(worst) +
               " (<= 1e-6 required)");
}

// ---------------------------------------------------------------- criterion 7
void conformancePower() {
    Domain d = buildTreasureMap(1.0);
    const Alphabet& a = d.hidden.alphabet();
    LearnerConfig cfg;
    cfg.ct_budget = 500;
    cfg.mcts.trajectories_per_action = 25;
    cfg.mcts.simulation_depth = 15;

    // 20 single-edge reward mutations over reachable edges
    std::vector<std::pair<int, ObsId>> edges;
    for (int u = 0; u < d.hidden.numNodes(); ++u)
        for (ObsId z = 0; z < a.size(); ++z) edges.emplace_back(u, z);
    std::mt19937_64 shuffleRng(99);
    std::shuffle(edges.begin(), edges.end(), shuffleRng);
    edges.resize(20);

    int totalFound[3] = {0, 0, 0};
    std::vector<int> foundPerMutation(20, 0);
    for (size_t mi = 0; mi < edges.size(); ++mi) {
        auto [mu, mz] = edges[mi];
        MachineBuilder b(a, d.hidden.numNodes(), d.hidden.start(), d.hidden.defaultReward());
        for (int u = 0; u < d.hidden.numNodes(); ++u)
            for (ObsId z = 0; z < a.size(); ++z)
                b.edge(u, z, d.hidden.target(u, z),
                       d.hidden.output(u, z) + ((u == mu && z == mz) ? 13.5 : 0.0));
        MealyRewardMachine wrong = b.build();
        for (int si = 0; si < 3; ++si) {
            Session session(d, 50 + static_cast<std::uint64_t>(si));
            if (conformanceTest(session, wrong, cfg, ExplorationMode::Mcts).has_value()) {
                ++totalFound[si];
                ++foundPerMutation[mi];
            }
        }
    }
    bool perSeed = totalFound[0] >= 19 && totalFound[1] >= 19 && totalFound[2] >= 19;
    bool acrossSeeds = true;
    for (int f : foundPerMutation) acrossSeeds = acrossSeeds && f > 0;
    report(7, perSeed && acrossSeeds,
           "conformance testing power: per-seed hits " + std::to_string(totalFound[0]) + "/" +
               std::to_string(totalFound[1]) + "/" + std::to_string(totalFound[2]) +
               " of 20 (>= 19 required), every mutation caught across seeds: " +
               (acrossSeeds ? "yes" : "no"));
}

// ---------------------------------------------------------------- criterion 8
void batchDeterminism() {
    RunConfig cfg;
    cfg.domain = DomainKind::Treasure;
    cfg.mode = RunMode::LearnMcts;
    cfg.apf = 0.9;
    cfg.trials = 3;
    cfg.seed = 77;
    cfg.jobs = 3;
    cfg.learner_defaults = false;
    cfg.learner.mcts.trajectories_per_action = 25;
    cfg.learner.mcts.simulation_depth = 15;
    cfg.learner.acts_to_exploit = 300;

    BatchResult r1 = runBatch(cfg);
    BatchResult r2 = runBatch(cfg);
    bool pass = stripTimingColumns(r1.csv) == stripTimingColumns(r2.csv);
    report(8, pass,
           std::string("repeated batch CSV byte-identical modulo timing columns: ") +
               (pass ? "yes" : "no"));
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    cookieLearning();
    treasureLearningAndExploitation();
    lstarOracleEquivalence();
    productTraceIdentity();
    solverCorrectness();
    conformancePower();
    batchDeterminism();
    if (failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", failures);
    return 1;
}

#include <iostream>

#include "CLI11.hpp"
#include "mrlearn/experiment.hpp"

namespace {

using namespace mrlearn;

struct CommonArgs {
    std::string domain = "treasure";
    std::string mode = "learn-mcts";
    double apf = 0.95;
    int trials = 10;
    std::uint64_t seed = 1;
    std::string config_path;
    std::string out_path;
    std::string mdp_path, labeling_path, mrm_path;
    int jobs = 0;
};

void addCommon(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--domain", args.domain, "treasure, cookie or custom");
    cmd->add_option("--mode", args.mode, "learn-random, learn-mcts or optimal");
    cmd->add_option("--apf", args.apf, "action precision factor in (0,1]");
    cmd->add_option("--trials", args.trials, "number of seeded trials");
    cmd->add_option("--seed", args.seed, "base seed; trial i uses seed+i");
    cmd->add_option("--config", args.config_path, "key = value configuration file");
    cmd->add_option("--out", args.out_path, "output file path");
    cmd->add_option("--mdp", args.mdp_path, "explicit MDP file (custom domain)");
    cmd->add_option("--labeling", args.labeling_path, "labeling file (custom domain)");
    cmd->add_option("--mrm", args.mrm_path, "hidden machine file (custom domain)");
    cmd->add_option("--jobs", args.jobs, "parallel trial workers (0 = auto)");
}

RunConfig makeRunConfig(const CommonArgs& args) {
    RunConfig cfg;
    cfg.domain = domainKindFromString(args.domain);
    cfg.mode = runModeFromString(args.mode);
    cfg.apf = args.apf;
    cfg.trials = args.trials;
    cfg.seed = args.seed;
    cfg.out_path = args.out_path;
    cfg.mdp_path = args.mdp_path;
    cfg.labeling_path = args.labeling_path;
    cfg.mrm_path = args.mrm_path;
    cfg.jobs = args.jobs;
    if (!args.config_path.empty())
        applyConfig(cfg, parseKeyValueConfig(readFile(args.config_path)));
    return cfg;
}

int cmdLearn(const CommonArgs& args, bool dumpTable) {
    RunConfig cfg = makeRunConfig(args);
    cfg.validate();
    if (cfg.learner_defaults) cfg.learner = defaultLearnerConfig(cfg.domain, cfg.mode);
    Domain domain = buildDomain(cfg);
    Session session(domain, cfg.seed);

    MealyRewardMachine learned = domain.hidden;
    ExperimentLog log;
    if (cfg.mode == RunMode::Optimal) {
        OptimalResult r = runOptimalActiveLearning(session, cfg.learner, ExplorationMode::Mcts,
                                                   cfg.optimal_exploit_actions);
        learned = std::move(r.machine);
        log = r.log;
    } else {
        ExplorationMode mode = cfg.mode == RunMode::LearnMcts ? ExplorationMode::Mcts
                                                              : ExplorationMode::Random;
        ApproximateResult r = runApproximateActiveLearning(session, cfg.learner, mode);
        learned = std::move(r.machine);
        log = r.log;
    }

    bool ok = !equivalent(learned, domain.hidden).has_value();
    std::cout << "learned nodes:    " << learned.numNodes() << "\n"
              << "equivalent:       " << (ok ? "yes" : "no") << "\n"
              << "return:           " << log.total_return << "\n"
              << "mq attempts:      " << log.mq_attempts << "\n"
              << "counterexamples:  " << log.counterexamples << "\n"
              << "epochs:           " << log.epochs << "\n"
              << "learn seconds:    " << log.learn_seconds << "\n"
              << "exploit seconds:  " << log.exploit_seconds << "\n";
    if (dumpTable) {
        // re-run the pure L* view against the learned machine for inspection
        PerfectTeacherResult replay = learnWithPerfectTeacher(learned);
        std::cout << "\nfinal observation-table shape (perfect-teacher replay):\n"
                  << replay.machine.describe();
    }
    if (!args.out_path.empty()) {
        writeFile(args.out_path, emitMrm(learned));
        std::cout << "learned machine written to " << args.out_path << "\n";
    }
    return ok ? 0 : 1;
}

int cmdExploit(const CommonArgs& args, int episodes, int horizon) {
    RunConfig cfg = makeRunConfig(args);
    cfg.validate();
    if (cfg.learner_defaults) cfg.learner = defaultLearnerConfig(cfg.domain, cfg.mode);
    Domain domain = buildDomain(cfg);
    MealyRewardMachine machine =
        args.mrm_path.empty() || cfg.domain != DomainKind::Custom
            ? (cfg.mrm_path.empty() ? domain.hidden : parseMrm(readFile(cfg.mrm_path)))
            : domain.hidden;

    ProductMdp prod = product(domain.mdp, domain.labeling, machine);
    SolveResult solved = valueIteration(prod, cfg.learner.gamma, cfg.learner.vi_tol);
    std::cout << "product states:   " << prod.numStates() << "\n"
              << "V(s0,u0):         " << solved.values.at(prod.initial) << "\n"
              << "sweeps:           " << solved.sweeps << "\n";

    Session session(domain, cfg.seed);
    double total = 0.0;
    for (int ep = 0; ep < episodes; ++ep) {
        session.reset();
        int u = machine.start();
        RewardTrace rewards;
        for (int t = 0; t < horizon; ++t) {
            int ps = prod.indexOf(session.state(), u);
            int a = solved.strategy.action(ps);
            if (a < 0) break;
            auto out = session.step(a);
            rewards.push_back(out.reward);
            u = machine.step(u, out.obs).first;
        }
        total += discountedSum(rewards, cfg.learner.gamma);
    }
    std::cout << "mean dSum over " << episodes << " episodes: " << total / episodes << "\n";
    if (!args.out_path.empty()) {
        writeFile(args.out_path, exportStrategy(prod, solved.strategy, domain.mdp));
        std::cout << "strategy written to " << args.out_path << "\n";
    }
    return 0;
}

int cmdBatch(const CommonArgs& args) {
    RunConfig cfg = makeRunConfig(args);
    BatchResult result = runBatch(cfg);
    std::cout << result.csv;
    if (!cfg.out_path.empty()) std::cout << "rows written to " << cfg.out_path << "\n";
    return 0;
}

int cmdInspectTable(const CommonArgs& args) {
    RunConfig cfg = makeRunConfig(args);
    cfg.validate();
    Domain domain = buildDomain(cfg);
    // run pure L* against the hidden machine and show the table growth
    ObservationTable table(domain.hidden.alphabet());
    table.setDefaultReward(domain.hidden.defaultReward());
    long long queries = 0;
    while (auto q = table.getMQ()) {
        table.resolveMQ(*q, domain.hidden.run(*q));
        ++queries;
    }
    for (;;) {
        MealyRewardMachine hyp = table.buildRewardMachine();
        auto ce = equivalent(hyp, domain.hidden);
        if (!ce) break;
        table.addCounterExample(*ce, domain.hidden.run(*ce));
        while (auto q = table.getMQ()) {
            table.resolveMQ(*q, domain.hidden.run(*q));
            ++queries;
        }
    }
    std::cout << table.dump() << "\n"
              << "prefixes: " << table.numPrefixes() << "  suffixes: " << table.numSuffixes()
              << "  membership queries: " << queries << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active learning and exploitation of Mealy reward machines in MDPs"};
    app.require_subcommand(1);

    CommonArgs learnArgs, exploitArgs, batchArgs, inspectArgs;
    bool dumpTable = false;
    int episodes = 100, horizon = 400;

    CLI::App* learn = app.add_subcommand("learn", "run one learning trial");
    addCommon(learn, learnArgs);
    learn->add_flag("--dump-table", dumpTable, "print the learned machine's structure");

    CLI::App* exploit = app.add_subcommand("exploit", "solve the product and run the strategy");
    addCommon(exploit, exploitArgs);
    exploit->add_option("--episodes", episodes, "evaluation episodes");
    exploit->add_option("--horizon", horizon, "actions per episode");

    CLI::App* batch = app.add_subcommand("batch", "run a seeded batch and emit CSV metrics");
    addCommon(batch, batchArgs);

    CLI::App* inspect = app.add_subcommand("inspect-table", "dump the final observation table");
    addCommon(inspect, inspectArgs);

    try {
        app.parse(argc, argv);
        if (learn->parsed()) return cmdLearn(learnArgs, dumpTable);
        if (exploit->parsed()) return cmdExploit(exploitArgs, episodes, horizon);
        if (batch->parsed()) return cmdBatch(batchArgs);
        if (inspect->parsed()) return cmdInspectTable(inspectArgs);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

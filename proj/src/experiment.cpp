#include "mrlearn/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>
#include <thread>

namespace mrlearn {

DomainKind domainKindFromString(const std::string& s) {
    if (s == "treasure") return DomainKind::Treasure;
    if (s == "cookie") return DomainKind::Cookie;
    if (s == "custom") return DomainKind::Custom;
    throw ConfigError("unknown domain '" + s + "' (treasure, cookie, custom)");
}

RunMode runModeFromString(const std::string& s) {
    if (s == "learn-random") return RunMode::LearnRandom;
    if (s == "learn-mcts") return RunMode::LearnMcts;
    if (s == "optimal") return RunMode::Optimal;
    throw ConfigError("unknown mode '" + s + "' (learn-random, learn-mcts, optimal)");
}

void RunConfig::validate() const {
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (!(apf > 0.0 && apf <= 1.0)) throw ConfigError("apf must lie in (0, 1]");
    if (domain == DomainKind::Custom && (mdp_path.empty() || labeling_path.empty() ||
                                         mrm_path.empty()))
        throw ConfigError("custom domains need mdp, labeling and mrm files");
}

LearnerConfig defaultLearnerConfig(DomainKind domain, RunMode mode) {
    LearnerConfig cfg;  // Treasure-Map paper settings are the baseline
    if (domain == DomainKind::Cookie) {
        // random exploration answers queries by rejection sampling: attempts
        // are cheap, so allow many short ones and a long exploitation run
        cfg.acts_to_exploit = 20000;
        cfg.mq_action_budget = 200;
        cfg.mq_max_attempts = 50000;
        cfg.ct_bound = 10;
    }
    if (mode == RunMode::Optimal) cfg.dynamic_theta = false;
    return cfg;
}

Domain buildDomain(const RunConfig& cfg) {
    switch (cfg.domain) {
        case DomainKind::Treasure: return buildTreasureMap(cfg.apf, cfg.default_reward);
        case DomainKind::Cookie: return buildCookieDomain();
        case DomainKind::Custom: {
            MealyRewardMachine machine = parseMrm(readFile(cfg.mrm_path));
            NrMdp mdp = parseMdp(readFile(cfg.mdp_path));
            LabelingFunction lab =
                parseLabeling(readFile(cfg.labeling_path), machine.alphabet(), mdp);
            return Domain{std::move(mdp), std::move(lab), std::move(machine)};
        }
    }
    throw ConfigError("unreachable domain kind");
}

namespace {

long long parseIntOr(const std::string& v, const std::string& key) {
    try {
        size_t used = 0;
        long long out = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("value for '" + key + "' is not an integer: '" + v + "'");
    }
}

double parseDoubleOr(const std::string& v, const std::string& key) {
    try {
        size_t used = 0;
        double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("value for '" + key + "' is not a number: '" + v + "'");
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

void applyConfig(RunConfig& cfg, const std::map<std::string, std::string>& entries) {
    for (const auto& [key, value] : entries) {
        if (key == "domain") cfg.domain = domainKindFromString(value);
        else if (key == "mode") cfg.mode = runModeFromString(value);
        else if (key == "apf") cfg.apf = parseDoubleOr(value, key);
        else if (key == "trials") cfg.trials = static_cast<int>(parseIntOr(value, key));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parseIntOr(value, key));
        else if (key == "out") cfg.out_path = value;
        else if (key == "mdp") cfg.mdp_path = value;
        else if (key == "labeling") cfg.labeling_path = value;
        else if (key == "mrm") cfg.mrm_path = value;
        else if (key == "default_reward") cfg.default_reward = parseDoubleOr(value, key);
        else if (key == "optimal_exploit_actions")
            cfg.optimal_exploit_actions = parseIntOr(value, key);
        else if (key == "jobs") cfg.jobs = static_cast<int>(parseIntOr(value, key));
        else if (key == "theta") { cfg.learner.theta = parseDoubleOr(value, key); cfg.learner_defaults = false; }
        else if (key == "dynamic_theta") { cfg.learner.dynamic_theta = parseIntOr(value, key) != 0; cfg.learner_defaults = false; }
        else if (key == "beta") { cfg.learner.beta = parseDoubleOr(value, key); cfg.learner_defaults = false; }
        else if (key == "gamma") { cfg.learner.gamma = parseDoubleOr(value, key); cfg.learner_defaults = false; }
        else if (key == "k") { cfg.learner.k = static_cast<int>(parseIntOr(value, key)); cfg.learner_defaults = false; }
        else if (key == "acts_to_exploit") { cfg.learner.acts_to_exploit = parseIntOr(value, key); cfg.learner_defaults = false; }
        else if (key == "mq_action_budget") { cfg.learner.mq_action_budget = parseIntOr(value, key); cfg.learner_defaults = false; }
        else if (key == "mq_max_attempts") { cfg.learner.mq_max_attempts = parseIntOr(value, key); cfg.learner_defaults = false; }
        else if (key == "arbitrary_reward") { cfg.learner.arbitrary_reward = parseDoubleOr(value, key); cfg.learner_defaults = false; }
        else if (key == "ct_bound") { cfg.learner.ct_bound = static_cast<int>(parseIntOr(value, key)); cfg.learner_defaults = false; }
        else if (key == "ct_budget") { cfg.learner.ct_budget = static_cast<int>(parseIntOr(value, key)); cfg.learner_defaults = false; }
        else if (key == "mcts_depth") { cfg.learner.mcts.simulation_depth = static_cast<int>(parseIntOr(value, key)); cfg.learner_defaults = false; }
        else if (key == "mcts_trajectories") { cfg.learner.mcts.trajectories_per_action = static_cast<int>(parseIntOr(value, key)); cfg.learner_defaults = false; }
        else if (key == "mcts_exploration") { cfg.learner.mcts.exploration_constant = parseDoubleOr(value, key); cfg.learner_defaults = false; }
        else if (key == "mcts_x") { cfg.learner.mcts.step_penalty = parseDoubleOr(value, key); cfg.learner_defaults = false; }
        else if (key == "mcts_y") { cfg.learner.mcts.observation_stake = parseDoubleOr(value, key); cfg.learner_defaults = false; }
        else if (key == "row_tolerance") { cfg.learner.row_tolerance = parseDoubleOr(value, key); cfg.learner_defaults = false; }
        else if (key == "vi_tol") { cfg.learner.vi_tol = parseDoubleOr(value, key); cfg.learner_defaults = false; }
        else throw ConfigError("unknown configuration key '" + key + "'");
    }
}

std::string batchCsv(const std::vector<TrialRow>& rows) {
    std::ostringstream os;
    os << "trial,seed,apf,return,mq_attempts,counterexamples,learn_seconds,exploit_seconds,"
          "epochs,learned_ok\n";
    for (const auto& r : rows)
        os << r.trial << "," << r.seed << "," << fmt(r.apf) << "," << fmt(r.ret) << ","
           << r.mq_attempts << "," << r.counterexamples << "," << fmt(r.learn_seconds) << ","
           << fmt(r.exploit_seconds) << "," << r.epochs << "," << r.learned_ok << "\n";

    auto meanSd = [&](auto pick) {
        double mean = 0.0;
        for (const auto& r : rows) mean += pick(r);
        mean /= static_cast<double>(rows.size());
        double var = 0.0;
        if (rows.size() > 1) {
            for (const auto& r : rows) {
                double d = pick(r) - mean;
                var += d * d;
            }
            var /= static_cast<double>(rows.size() - 1);
        }
        return fmt(mean) + "+-" + fmt(std::sqrt(var));
    };
    os << "mean,," << meanSd([](const TrialRow& r) { return r.apf; }) << ","
       << meanSd([](const TrialRow& r) { return r.ret; }) << ","
       << meanSd([](const TrialRow& r) { return static_cast<double>(r.mq_attempts); }) << ","
       << meanSd([](const TrialRow& r) { return static_cast<double>(r.counterexamples); }) << ","
       << meanSd([](const TrialRow& r) { return r.learn_seconds; }) << ","
       << meanSd([](const TrialRow& r) { return r.exploit_seconds; }) << ","
       << meanSd([](const TrialRow& r) { return static_cast<double>(r.epochs); }) << ","
       << meanSd([](const TrialRow& r) { return static_cast<double>(r.learned_ok); }) << "\n";
    return os.str();
}

std::string stripTimingColumns(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream os;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cols;
        std::string cur;
        std::istringstream ls(line);
        while (std::getline(ls, cur, ',')) cols.push_back(cur);
        if (cols.size() >= 8) {
            cols[6] = "-";  // learn_seconds
            cols[7] = "-";  // exploit_seconds
        }
        for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
        os << "\n";
    }
    return os.str();
}

BatchResult runBatch(const RunConfig& cfgIn) {
    RunConfig cfg = cfgIn;
    cfg.validate();
    if (cfg.learner_defaults) cfg.learner = defaultLearnerConfig(cfg.domain, cfg.mode);
    Domain domain = buildDomain(cfg);

    auto runTrial = [&cfg, &domain](int i) {
        std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
        Session session(domain, seed);
        TrialRow row;
        row.trial = i;
        row.seed = seed;
        row.apf = cfg.apf;
        MealyRewardMachine learned = domain.hidden;  // placeholder, overwritten below
        if (cfg.mode == RunMode::Optimal) {
            OptimalResult r = runOptimalActiveLearning(session, cfg.learner,
                                                       ExplorationMode::Mcts,
                                                       cfg.optimal_exploit_actions);
            learned = std::move(r.machine);
            row.ret = r.log.total_return;
            row.mq_attempts = r.log.mq_attempts;
            row.counterexamples = r.log.counterexamples;
            row.learn_seconds = r.log.learn_seconds;
            row.exploit_seconds = r.log.exploit_seconds;
            row.epochs = r.log.epochs;
        } else {
            ExplorationMode mode = cfg.mode == RunMode::LearnMcts ? ExplorationMode::Mcts
                                                                  : ExplorationMode::Random;
            ApproximateResult r = runApproximateActiveLearning(session, cfg.learner, mode);
            learned = std::move(r.machine);
            row.ret = r.log.total_return;
            row.mq_attempts = r.log.mq_attempts;
            row.counterexamples = r.log.counterexamples;
            row.learn_seconds = r.log.learn_seconds;
            row.exploit_seconds = r.log.exploit_seconds;
            row.epochs = r.log.epochs;
        }
        row.learned_ok = equivalent(learned, domain.hidden).has_value() ? 0 : 1;
        return row;
    };

    BatchResult result;
    result.rows.resize(static_cast<size_t>(cfg.trials));
    int workers = cfg.jobs > 0 ? cfg.jobs
                               : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, cfg.trials);
    if (workers <= 1) {
        for (int i = 0; i < cfg.trials; ++i) result.rows[static_cast<size_t>(i)] = runTrial(i);
    } else {
        std::vector<std::future<TrialRow>> futures;
        futures.reserve(static_cast<size_t>(cfg.trials));
        for (int i = 0; i < cfg.trials; ++i)
            futures.push_back(std::async(std::launch::async, runTrial, i));
        for (int i = 0; i < cfg.trials; ++i)
            result.rows[static_cast<size_t>(i)] = futures[static_cast<size_t>(i)].get();
    }

    result.csv = batchCsv(result.rows);
    if (!cfg.out_path.empty()) writeFile(cfg.out_path, result.csv);
    return result;
}

} // namespace mrlearn

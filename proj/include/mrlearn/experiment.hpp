#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrlearn/agent.hpp"
#include "mrlearn/formats.hpp"

namespace mrlearn {

enum class DomainKind { Treasure, Cookie, Custom };
enum class RunMode { LearnRandom, LearnMcts, Optimal };

DomainKind domainKindFromString(const std::string& s);
RunMode runModeFromString(const std::string& s);

struct RunConfig {
    DomainKind domain = DomainKind::Treasure;
    RunMode mode = RunMode::LearnMcts;
    double apf = 0.95;
    int trials = 10;
    std::uint64_t seed = 1;
    LearnerConfig learner;
    bool learner_defaults = true;  // derive learner defaults from domain/mode
    double default_reward = -1.0;  // treasure null cost c
    long long optimal_exploit_actions = 20000;
    int jobs = 0;                  // 0 = one worker per trial up to hardware
    std::string out_path;
    std::string mdp_path, labeling_path, mrm_path;  // custom domains

    void validate() const;
};

/// Domain-tuned learner defaults: the paper's Treasure-Map settings, wider
/// budgets for the Cookie domain's random exploration.
LearnerConfig defaultLearnerConfig(DomainKind domain, RunMode mode);

Domain buildDomain(const RunConfig& cfg);

/// Applies `key = value` entries onto a RunConfig; unknown keys raise
/// ConfigError naming the key.
void applyConfig(RunConfig& cfg, const std::map<std::string, std::string>& entries);

struct TrialRow {
    int trial = 0;
    std::uint64_t seed = 0;
    double apf = 0.0;
    double ret = 0.0;
    long long mq_attempts = 0;
    long long counterexamples = 0;
    double learn_seconds = 0.0;
    double exploit_seconds = 0.0;
    long long epochs = 0;
    int learned_ok = 0;
};

struct BatchResult {
    std::vector<TrialRow> rows;
    std::string csv;
};

/// Runs `trials` independent seeded trials (seed, seed+1, ...) and renders
/// the CSV: one row per trial plus a final mean +/- sample-stddev row.
/// learned_ok is 1 iff the learned machine is equivalent to the hidden one.
BatchResult runBatch(const RunConfig& cfg);

std::string batchCsv(const std::vector<TrialRow>& rows);

/// The CSV with the wall-clock columns blanked, for reproducibility checks.
std::string stripTimingColumns(const std::string& csv);

} // namespace mrlearn

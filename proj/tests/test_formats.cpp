#include "doctest.h"
#include "helpers.hpp"
#include "mrlearn/environments.hpp"
#include "mrlearn/experiment.hpp"
#include "mrlearn/formats.hpp"

using namespace mrlearn;

TEST_CASE("mrm round trip preserves the machine") {
    for (const MealyRewardMachine& m : {treasureMachine(-1.0), cookieMachine()}) {
        std::string text = emitMrm(m);
        MealyRewardMachine back = parseMrm(text);
        CHECK(back.numNodes() == m.numNodes());
        CHECK(back.defaultReward() == m.defaultReward());
        CHECK(!equivalent(back, m).has_value());
    }
}

TEST_CASE("mrm parse errors carry diagnostics") {
    CHECK_THROWS_WITH_AS(parseMrm("alphabet: a b\nstart: u0\nu0 zz u0 5\n"),
                         doctest::Contains("unknown symbol 'zz'"), ModelParseError);
    CHECK_THROWS_AS(parseMrm("start: u0\nu0 a u0 5\n"), ModelParseError);  // no alphabet
    CHECK_THROWS_AS(parseMrm("alphabet: a\nu0 a u0 5\n"), ModelParseError);  // no start
    CHECK_THROWS_AS(parseMrm("alphabet: a\nstart: u0\nu0 a u0 funf\n"), ModelParseError);
}

TEST_CASE("omitted mrm edges default to zero self-loops") {
    // only the interesting edges written down; the rest self-loop at zero
    std::string text =
        "alphabet: m e g t j1 j2\n"
        "start: u0\n"
        "default: -1\n"
        "u0 m u1 10\n"
        "u1 e u2 25\n"
        "u1 g u2 25\n"
        "u1 j1 u3 60\n"
        "u1 j2 u3 60\n"
        "u2 t u4 90\n"
        "u4 j1 u1 35\n"
        "u4 j2 u1 35\n";
    MealyRewardMachine parsed = parseMrm(text);
    CHECK(!equivalent(parsed, treasureMachine(-1.0)).has_value());
}

TEST_CASE("explicit MDP and labeling round trip") {
    Domain d = buildTreasureMap(0.85);
    NrMdp back = parseMdp(emitMdp(d.mdp));
    CHECK(back.numStates() == d.mdp.numStates());
    CHECK(back.initial == d.mdp.initial);
    for (int s = 0; s < back.numStates(); ++s)
        for (int a = 0; a < back.numActions(); ++a) CHECK(back.row(s, a) == d.mdp.row(s, a));

    LabelingFunction lab = parseLabeling(emitLabeling(d.labeling, d.mdp),
                                         d.hidden.alphabet(), d.mdp);
    for (int a = 0; a < lab.numActions(); ++a)
        for (int s = 0; s < lab.numStates(); ++s) CHECK(lab(a, s) == d.labeling(a, s));

    SUBCASE("parse errors") {
        CHECK_THROWS_AS(parseMdp("states: s\nactions: a\ninitial: s\ns a s 0.4\n"),
                        ModelParseError);  // row sums to 0.4
        CHECK_THROWS_AS(parseMdp("states: s\nactions: a\ninitial: zz\n"), ModelParseError);
        CHECK_THROWS_AS(parseLabeling("a s ghost\n", d.hidden.alphabet(), d.mdp),
                        ModelParseError);
    }
}

TEST_CASE("key = value configuration parsing") {
    auto entries = parseKeyValueConfig("# comment\n trials = 4 \nseed=9\n\napf = 0.85\n");
    CHECK(entries.at("trials") == "4");
    CHECK(entries.at("seed") == "9");
    CHECK(entries.at("apf") == "0.85");
    CHECK_THROWS_AS(parseKeyValueConfig("novalue\n"), ConfigError);
    CHECK_THROWS_AS(parseKeyValueConfig("key =\n"), ConfigError);

    RunConfig cfg;
    applyConfig(cfg, entries);
    CHECK(cfg.trials == 4);
    CHECK(cfg.seed == 9);
    CHECK(cfg.apf == doctest::Approx(0.85));
    CHECK_THROWS_AS(applyConfig(cfg, {{"frobnicate", "1"}}), ConfigError);
}

TEST_CASE("runBatch validates its configuration") {
    RunConfig cfg;
    cfg.trials = 0;
    CHECK_THROWS_AS(runBatch(cfg), ConfigError);
    cfg.trials = 1;
    cfg.apf = 1.5;
    CHECK_THROWS_AS(runBatch(cfg), ConfigError);
    RunConfig custom;
    custom.domain = DomainKind::Custom;
    CHECK_THROWS_AS(runBatch(custom), ConfigError);  // missing model files
}

TEST_CASE("seeded batches reproduce byte-identical CSV modulo timing") {
    RunConfig cfg;
    cfg.domain = DomainKind::Treasure;
    cfg.mode = RunMode::LearnMcts;
    cfg.apf = 1.0;
    cfg.trials = 2;
    cfg.seed = 5;
    cfg.jobs = 2;
    cfg.learner_defaults = false;
    cfg.learner.mcts.trajectories_per_action = 25;
    cfg.learner.mcts.simulation_depth = 15;
    cfg.learner.acts_to_exploit = 200;

    BatchResult r1 = runBatch(cfg);
    BatchResult r2 = runBatch(cfg);
    CHECK(stripTimingColumns(r1.csv) == stripTimingColumns(r2.csv));
    for (const auto& row : r1.rows) CHECK(row.learned_ok == 1);
    CHECK(r1.csv.find("mean,") != std::string::npos);
}

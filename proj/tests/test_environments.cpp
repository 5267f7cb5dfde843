#include <map>
#include <set>

#include "doctest.h"
#include "mrlearn/agent.hpp"
#include "mrlearn/environments.hpp"

using namespace mrlearn;

namespace {

ObservationTrace traceOf(const Alphabet& a, std::initializer_list<const char*> syms) {
    ObservationTrace t;
    for (const char* s : syms) t.push_back(a.id(s));
    return t;
}

using Belief = std::vector<int>;  // sorted world states compatible with the trace so far

Belief nullClosure(const Domain& d, Belief b) {
    std::set<int> seen(b.begin(), b.end());
    std::vector<int> frontier = b;
    while (!frontier.empty()) {
        int s = frontier.back();
        frontier.pop_back();
        for (int a = 0; a < d.mdp.numActions(); ++a) {
            if (!d.mdp.defined(s, a)) continue;
            for (auto [s2, p] : d.mdp.row(s, a)) {
                if (p <= 0.0 || d.labeling(a, s2) != kNullObs) continue;
                if (seen.insert(s2).second) frontier.push_back(s2);
            }
        }
    }
    return Belief(seen.begin(), seen.end());
}

Belief observe(const Domain& d, const Belief& closed, ObsId z) {
    std::set<int> out;
    for (int s : closed)
        for (int a = 0; a < d.mdp.numActions(); ++a) {
            if (!d.mdp.defined(s, a)) continue;
            for (auto [s2, p] : d.mdp.row(s, a))
                if (p > 0.0 && d.labeling(a, s2) == z) out.insert(s2);
        }
    return Belief(out.begin(), out.end());
}

std::vector<bool> nonzeroRewardReachable(const MealyRewardMachine& m) {
    // nodes from which some path emits a nonzero output
    std::vector<bool> hot(static_cast<size_t>(m.numNodes()), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int u = 0; u < m.numNodes(); ++u) {
            if (hot[static_cast<size_t>(u)]) continue;
            for (ObsId z = 0; z < m.alphabet().size(); ++z)
                if (m.output(u, z) != 0.0 || hot[static_cast<size_t>(m.target(u, z))]) {
                    hot[static_cast<size_t>(u)] = true;
                    changed = true;
                    break;
                }
        }
    }
    return hot;
}

} // namespace

TEST_CASE("treasure map construction") {
    CHECK_THROWS_AS(buildTreasureMap(0.0), InvalidApf);
    CHECK_THROWS_AS(buildTreasureMap(1.5), InvalidApf);

    Domain d = buildTreasureMap(1.0);
    CHECK(d.mdp.numStates() == 100);
    CHECK_NOTHROW(d.mdp.validate());

    const Alphabet& a = d.hidden.alphabet();
    CHECK(d.hidden.run(traceOf(a, {"m", "g", "t", "j2"})) == RewardTrace{10, 25, 90, 35});
    CHECK(d.hidden.run(traceOf(a, {"m", "j1", "j2"})) == RewardTrace{10, 60, 0});

    SUBCASE("documented label coordinates") {
        auto labelAt = [&](const std::string& name) {
            for (int s = 0; s < d.mdp.numStates(); ++s)
                if (d.mdp.state_names[static_cast<size_t>(s)] == name) return d.labeling(0, s);
            return kNullObs;
        };
        CHECK(labelAt("1_8") == a.id("m"));
        CHECK(labelAt("3_1") == a.id("e"));
        CHECK(labelAt("8_1") == a.id("g"));
        CHECK(labelAt("8_8") == a.id("t"));
        CHECK(labelAt("1_1") == a.id("j1"));
        CHECK(labelAt("5_4") == a.id("j2"));
        CHECK(labelAt("0_0") == kNullObs);  // start cell is null
    }

    SUBCASE("deterministic when apf is 1") {
        Session s1(d, 11), s2(d, 11);
        std::vector<int> actions{2, 2, 1, 0, 3, 2, 1, 1, 2, 3, 0, 1};
        for (int a2 : actions) {
            auto o1 = s1.step(a2);
            auto o2 = s2.step(a2);
            CHECK(o1.state == o2.state);
            CHECK(o1.obs == o2.obs);
            CHECK(o1.reward == o2.reward);
        }
    }

    SUBCASE("every alphabet symbol is reachable") {
        std::set<ObsId> producible;
        for (int act = 0; act < d.mdp.numActions(); ++act)
            for (int s = 0; s < d.mdp.numStates(); ++s)
                if (d.labeling(act, s) != kNullObs) producible.insert(d.labeling(act, s));
        CHECK(static_cast<int>(producible.size()) == a.size());
    }

    SUBCASE("every short observation sequence is realizable") {
        // open grid: chases can route around the labeled cells
        for (const auto& t : {traceOf(a, {"m"}), traceOf(a, {"j2", "j1"}),
                              traceOf(a, {"t", "t", "m"}), traceOf(a, {"g", "e", "j1", "j2"}),
                              traceOf(a, {"m", "m", "m", "m", "m", "m"})})
            CHECK(feasibleObservationSequence(d.mdp, d.labeling, t));
    }
}

TEST_CASE("grid parser diagnostics") {
    CHECK_THROWS_AS(gridFromAscii("..\n.\n"), ModelParseError);       // ragged
    CHECK_THROWS_AS(gridFromAscii("..\n..\n"), ModelParseError);      // no start
    CHECK_THROWS_AS(gridFromAscii("S.\n.x\n"), ModelParseError);      // x not in legend
    GridSpec ok = gridFromAscii("S.\n.m\nlegend:\nm m\n");
    CHECK(ok.width == 2);
    CHECK(ok.height == 2);
    CHECK(ok.legend.at('m') == "m");
}

TEST_CASE("cookie domain construction") {
    Domain d = buildCookieDomain();
    CHECK_NOTHROW(d.mdp.validate());
    const Alphabet& a = d.hidden.alphabet();
    CHECK(a.size() == 8);

    SUBCASE("labeling matches the described cases") {
        // initial state: agent in the yellow room
        int s0 = d.mdp.initial;
        CHECK(d.labeling(4, s0) == a.id("yel_bd"));  // push_button
        CHECK(d.labeling(0, s0) == a.id("yel"));     // any other action
        // walking east lands in the passage: null
        auto row = d.mdp.row(s0, 1);
        REQUIRE(row.size() == 1);
        CHECK(d.labeling(1, row[0].first) == kNullObs);
    }

    SUBCASE("hidden machine on the press-see-eat trace") {
        CHECK(d.hidden.run(traceOf(a, {"yel_bd", "blu_cook", "blu_crum"})) ==
              RewardTrace{0, 0, 1});
    }

    SUBCASE("cookie placement is uniform over 10000 presses") {
        Session session(d, 321);
        int blue = 0;
        const int presses = 10000;
        for (int i = 0; i < presses; ++i) {
            session.reset();
            auto out = session.step(4);  // press in the yellow room
            const std::string& name = d.mdp.state_names[static_cast<size_t>(out.state)];
            if (name.find("+cB") != std::string::npos) ++blue;
        }
        double frac = static_cast<double>(blue) / presses;
        CHECK(frac >= 0.48);
        CHECK(frac <= 0.52);
    }

    SUBCASE("only pressing is stochastic") {
        for (int s = 0; s < d.mdp.numStates(); ++s)
            for (int act = 0; act < d.mdp.numActions(); ++act) {
                if (!d.mdp.defined(s, act)) continue;
                if (d.mdp.row(s, act).size() > 1) CHECK(act == 4);
            }
    }

    SUBCASE("every alphabet symbol is producible") {
        std::set<ObsId> producible;
        for (int act = 0; act < d.mdp.numActions(); ++act)
            for (int s = 0; s < d.mdp.numStates(); ++s)
                if (d.labeling(act, s) != kNullObs) producible.insert(d.labeling(act, s));
        CHECK(static_cast<int>(producible.size()) == 8);
    }
}

TEST_CASE("cookie hidden machine is faithful to what the world can produce") {
    // Walk every reachable (belief, node) pair. Wherever an observation is
    // impossible, the machine must promise nothing (zero rewards forever);
    // wherever a crumbs observation is possible it is an eat worth 1.
    Domain d = buildCookieDomain();
    const MealyRewardMachine& m = d.hidden;
    const Alphabet& a = m.alphabet();
    std::vector<bool> hot = nonzeroRewardReachable(m);
    ObsId bluCrum = a.id("blu_crum");
    ObsId redCrum = a.id("red_crum");

    std::set<std::pair<Belief, int>> seen;
    std::vector<std::pair<Belief, int>> frontier;
    Belief b0 = nullClosure(d, {d.mdp.initial});
    frontier.emplace_back(b0, m.start());
    seen.insert(frontier.back());
    int checked = 0;
    while (!frontier.empty()) {
        auto [belief, node] = frontier.back();
        frontier.pop_back();
        for (ObsId z = 0; z < a.size(); ++z) {
            Belief next = observe(d, belief, z);
            int target = m.target(node, z);
            double reward = m.output(node, z);
            ++checked;
            if (next.empty()) {
                // unrealizable here: the machine may not promise any reward
                CHECK(reward == 0.0);
                CHECK(!hot[static_cast<size_t>(target)]);
                continue;
            }
            if (z == bluCrum || z == redCrum) {
                CHECK(reward == doctest::Approx(1.0));  // crumbs appear only at an eat
            } else {
                CHECK(reward == 0.0);
            }
            auto key = std::make_pair(nullClosure(d, next), target);
            if (seen.insert(key).second) frontier.push_back(key);
        }
    }
    CHECK(checked > 0);
    MESSAGE("belief-node pairs checked: ", seen.size());
}

TEST_CASE("session reset restores both the state and the machine node") {
    Domain d = buildTreasureMap(0.9);
    Session s(d, 77);
    for (int i = 0; i < 25; ++i) s.step(i % 4);
    CHECK(s.actionCount() == 25);
    s.reset();
    CHECK(s.state() == d.mdp.initial);
    CHECK(s.hiddenNode() == d.hidden.start());
}

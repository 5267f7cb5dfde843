#include "mrlearn/machine.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "mrlearn/mdp.hpp"

namespace mrlearn {

MealyRewardMachine::MealyRewardMachine(Alphabet alphabet, int startNode, double defaultReward,
                                       std::vector<std::vector<int>> next,
                                       std::vector<std::vector<double>> out)
    : alphabet_(std::move(alphabet)),
      start_(startNode),
      default_reward_(defaultReward),
      next_(std::move(next)),
      out_(std::move(out)) {
    const size_t n = next_.size();
    if (n == 0) throw UnknownNode("machine needs at least one node");
    if (out_.size() != n) throw ModelInvalid("transition/output tables differ in node count");
    if (start_ < 0 || static_cast<size_t>(start_) >= n)
        throw UnknownNode("start node out of range");
    const size_t z = static_cast<size_t>(alphabet_.size());
    for (size_t u = 0; u < n; ++u) {
        if (next_[u].size() != z || out_[u].size() != z)
            throw ModelInvalid("transition/output tables must be total over the alphabet");
        for (int v : next_[u])
            if (v < 0 || static_cast<size_t>(v) >= n)
                throw UnknownNode("transition target out of range");
    }
}

int MealyRewardMachine::checkNode(int node) const {
    if (node < 0 || node >= numNodes())
        throw UnknownNode("node " + std::to_string(node) + " not in machine");
    return node;
}

int MealyRewardMachine::checkObs(ObsId z) const {
    if (!alphabet_.validId(z))
        throw UnknownObservation("observation id " + std::to_string(z) +
                                 " not in the machine alphabet");
    return z;
}

std::pair<int, double> MealyRewardMachine::step(int node, ObsId z) const {
    checkNode(node);
    if (z == kNullObs) return {node, default_reward_};
    checkObs(z);
    return {next_[static_cast<size_t>(node)][static_cast<size_t>(z)],
            out_[static_cast<size_t>(node)][static_cast<size_t>(z)]};
}

int MealyRewardMachine::walk(int node, const ObservationTrace& trace) const {
    int u = checkNode(node);
    for (ObsId z : trace) u = step(u, z).first;
    return u;
}

RewardTrace MealyRewardMachine::run(const ObservationTrace& trace) const {
    RewardTrace out;
    out.reserve(trace.size());
    int u = start_;
    for (ObsId z : trace) {
        auto [v, r] = step(u, z);
        out.push_back(r);
        u = v;
    }
    return out;
}

std::string MealyRewardMachine::describe() const {
    std::ostringstream os;
    os << numNodes() << " nodes, start u" << start_ << ", default " << default_reward_ << "\n";
    for (int u = 0; u < numNodes(); ++u)
        for (ObsId z = 0; z < alphabet_.size(); ++z)
            os << "  u" << u << " --" << alphabet_.name(z) << "|"
               << out_[static_cast<size_t>(u)][static_cast<size_t>(z)] << "--> u"
               << next_[static_cast<size_t>(u)][static_cast<size_t>(z)] << "\n";
    return os.str();
}

MachineBuilder::MachineBuilder(Alphabet alphabet, int numNodes, int startNode,
                               double defaultReward)
    : alphabet_(std::move(alphabet)),
      num_nodes_(numNodes),
      start_(startNode),
      default_reward_(defaultReward) {
    if (numNodes <= 0) throw UnknownNode("machine needs at least one node");
    next_.assign(static_cast<size_t>(numNodes), {});
    out_.assign(static_cast<size_t>(numNodes), {});
    for (int u = 0; u < numNodes; ++u) {
        // unspecified edges default to zero-reward self-loops
        next_[static_cast<size_t>(u)].assign(static_cast<size_t>(alphabet_.size()), u);
        out_[static_cast<size_t>(u)].assign(static_cast<size_t>(alphabet_.size()), 0.0);
    }
}

MachineBuilder& MachineBuilder::edge(int from, const std::string& symbol, int to, double reward) {
    return edge(from, alphabet_.id(symbol), to, reward);
}

MachineBuilder& MachineBuilder::edge(int from, ObsId symbol, int to, double reward) {
    if (from < 0 || from >= num_nodes_ || to < 0 || to >= num_nodes_)
        throw UnknownNode("edge endpoint out of range");
    if (!alphabet_.validId(symbol)) throw UnknownObservation("edge symbol not in alphabet");
    next_[static_cast<size_t>(from)][static_cast<size_t>(symbol)] = to;
    out_[static_cast<size_t>(from)][static_cast<size_t>(symbol)] = reward;
    return *this;
}

MealyRewardMachine MachineBuilder::build() const {
    return MealyRewardMachine(alphabet_, start_, default_reward_, next_, out_);
}

RewardTrace rewardsOfHistory(const MealyRewardMachine& machine, const LabelingFunction& labeling,
                             const History& history) {
    history.checkWellFormed();
    ObservationTrace obs;
    obs.reserve(history.length());
    for (size_t i = 0; i < history.length(); ++i)
        obs.push_back(labeling(history.actions[i], history.states[i + 1]));
    return machine.run(obs);
}

std::optional<ObservationTrace> equivalent(const MealyRewardMachine& m1,
                                           const MealyRewardMachine& m2, double tolerance) {
    if (!m1.alphabet().sameSet(m2.alphabet()))
        throw AlphabetMismatch("machines are over different alphabets");

    // Null behaviour is a constant self-loop, so it can only differ in the
    // default reward; any deeper difference is over Z alone.
    if (std::abs(m1.defaultReward() - m2.defaultReward()) > tolerance)
        return ObservationTrace{kNullObs};

    // Symbol ids may differ between the machines; walk m2 by name.
    std::vector<ObsId> toM2(static_cast<size_t>(m1.alphabet().size()));
    for (ObsId z = 0; z < m1.alphabet().size(); ++z)
        toM2[static_cast<size_t>(z)] = m2.alphabet().id(m1.alphabet().name(z));

    // BFS over the product of the two machines finds a shortest
    // distinguishing trace; symbol order makes it deterministic.
    struct Visit {
        int parent;   // index into visited
        ObsId symbol; // edge taken to reach this pair
    };
    std::vector<std::pair<int, int>> pairs;
    std::vector<Visit> visits;
    std::map<std::pair<int, int>, int> seen;
    std::deque<int> frontier;

    auto push = [&](int u1, int u2, int parent, ObsId symbol) {
        auto key = std::make_pair(u1, u2);
        if (seen.count(key)) return;
        seen.emplace(key, static_cast<int>(pairs.size()));
        pairs.push_back(key);
        visits.push_back({parent, symbol});
        frontier.push_back(static_cast<int>(pairs.size()) - 1);
    };

    push(m1.start(), m2.start(), -1, kNullObs);
    while (!frontier.empty()) {
        int cur = frontier.front();
        frontier.pop_front();
        auto [u1, u2] = pairs[static_cast<size_t>(cur)];
        for (ObsId z = 0; z < m1.alphabet().size(); ++z) {
            auto [v1, r1] = m1.step(u1, z);
            auto [v2, r2] = m2.step(u2, toM2[static_cast<size_t>(z)]);
            if (std::abs(r1 - r2) > tolerance) {
                ObservationTrace trace{z};
                for (int node = cur; visits[static_cast<size_t>(node)].parent >= 0;
                     node = visits[static_cast<size_t>(node)].parent)
                    trace.push_back(visits[static_cast<size_t>(node)].symbol);
                std::reverse(trace.begin(), trace.end());
                return trace;
            }
            push(v1, v2, cur, z);
        }
    }
    return std::nullopt;
}

} // namespace mrlearn

#include "mrlearn/product.hpp"

#include <deque>

namespace mrlearn {

ProductMdp product(const NrMdp& m, const LabelingFunction& lab, const MealyRewardMachine& rm) {
    // The labeling may only emit symbols the machine knows (null aside).
    for (int a = 0; a < lab.numActions(); ++a)
        for (int s = 0; s < lab.numStates(); ++s) {
            ObsId z = lab(a, s);
            if (z != kNullObs && !rm.alphabet().validId(z))
                throw AlphabetMismatch("labeling emits a symbol outside the machine alphabet");
        }

    ProductMdp p;
    p.num_actions = m.numActions();

    std::deque<int> frontier;
    auto intern = [&](int s, int u) {
        auto key = std::make_pair(s, u);
        auto it = p.index_.find(key);
        if (it != p.index_.end()) return it->second;
        int idx = static_cast<int>(p.states.size());
        p.states.push_back(key);
        p.trans.emplace_back(static_cast<size_t>(p.num_actions));
        p.index_.emplace(key, idx);
        frontier.push_back(idx);
        return idx;
    };

    p.initial = intern(m.initial, rm.start());
    while (!frontier.empty()) {
        int idx = frontier.front();
        frontier.pop_front();
        auto [s, u] = p.states[static_cast<size_t>(idx)];
        for (int a = 0; a < m.numActions(); ++a) {
            if (!m.defined(s, a)) continue;
            auto& succs = p.trans[static_cast<size_t>(idx)][static_cast<size_t>(a)];
            for (auto [s2, prob] : m.row(s, a)) {
                ObsId z = lab(a, s2);
                auto [u2, reward] = rm.step(u, z);
                succs.push_back({intern(s2, u2), prob, reward});
            }
        }
    }
    return p;
}

} // namespace mrlearn

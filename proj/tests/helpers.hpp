#pragma once

#include <random>
#include <string>
#include <vector>

#include "mrlearn/machine.hpp"

namespace mrlearn::testing {

/// Random Mealy reward machine: up to maxNodes nodes, alphabet size up to
/// maxSymbols, integer rewards in {0..9}. Not necessarily minimal.
inline MealyRewardMachine randomMachine(std::mt19937_64& rng, int maxNodes = 5,
                                        int maxSymbols = 4) {
    std::uniform_int_distribution<int> pickNodes(1, maxNodes);
    std::uniform_int_distribution<int> pickSymbols(1, maxSymbols);
    int n = pickNodes(rng);
    int nz = pickSymbols(rng);
    std::vector<std::string> symbols;
    for (int z = 0; z < nz; ++z) symbols.push_back("z" + std::to_string(z));
    Alphabet alphabet(symbols);
    std::uniform_int_distribution<int> pickTarget(0, n - 1);
    std::uniform_int_distribution<int> pickReward(0, 9);
    MachineBuilder b(alphabet, n, 0, 0.0);
    for (int u = 0; u < n; ++u)
        for (int z = 0; z < nz; ++z)
            b.edge(u, z, pickTarget(rng), static_cast<double>(pickReward(rng)));
    return b.build();
}

/// All observation traces over the machine's alphabet up to maxLen, in
/// length-then-lex order. Brute-force oracle helper.
inline std::vector<ObservationTrace> allTraces(const Alphabet& alphabet, int maxLen) {
    std::vector<ObservationTrace> out{{}};
    size_t levelBegin = 0;
    for (int len = 1; len <= maxLen; ++len) {
        size_t levelEnd = out.size();
        for (size_t i = levelBegin; i < levelEnd; ++i)
            for (ObsId z = 0; z < alphabet.size(); ++z) {
                ObservationTrace t = out[i];
                t.push_back(z);
                out.push_back(std::move(t));
            }
        levelBegin = levelEnd;
    }
    return out;
}

} // namespace mrlearn::testing

#pragma once

#include <map>
#include <string>
#include <vector>

#include "mrlearn/errors.hpp"

namespace mrlearn {

/// Observation symbols are small integer ids into a declared alphabet.
/// The distinguished null observation lives outside the alphabet.
using ObsId = int;
inline constexpr ObsId kNullObs = -1;

inline const std::string& nullObsName() {
    static const std::string name = "null";
    return name;
}

/// A finite, ordered observation alphabet Z. Declaration order is
/// significant: it fixes tie-breaking and iteration order everywhere.
class Alphabet {
public:
    Alphabet() = default;

    explicit Alphabet(std::vector<std::string> symbols) {
        for (auto& s : symbols) add(s);
    }

    ObsId add(const std::string& symbol) {
        if (symbol == nullObsName())
            throw AlphabetMismatch("'null' cannot be declared as an alphabet symbol");
        if (symbol.empty())
            throw AlphabetMismatch("empty observation symbol");
        auto it = index_.find(symbol);
        if (it != index_.end()) return it->second;
        ObsId id = static_cast<ObsId>(symbols_.size());
        symbols_.push_back(symbol);
        index_.emplace(symbol, id);
        return id;
    }

    bool contains(const std::string& symbol) const { return index_.count(symbol) > 0; }
    bool validId(ObsId z) const { return z >= 0 && z < static_cast<ObsId>(symbols_.size()); }

    ObsId id(const std::string& symbol) const {
        auto it = index_.find(symbol);
        if (it == index_.end())
            throw UnknownObservation("unknown observation symbol '" + symbol + "'");
        return it->second;
    }

    const std::string& name(ObsId z) const {
        if (z == kNullObs) return nullObsName();
        if (!validId(z))
            throw UnknownObservation("observation id " + std::to_string(z) + " out of range");
        return symbols_[static_cast<size_t>(z)];
    }

    int size() const { return static_cast<int>(symbols_.size()); }
    const std::vector<std::string>& symbols() const { return symbols_; }

    bool sameSet(const Alphabet& other) const {
        if (size() != other.size()) return false;
        for (const auto& s : symbols_)
            if (!other.contains(s)) return false;
        return true;
    }

    bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

private:
    std::vector<std::string> symbols_;
    std::map<std::string, ObsId> index_;
};

} // namespace mrlearn

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrlearn/machine.hpp"

namespace mrlearn {

/// L* observation table for Mealy machines. Prefix set S (prefix-closed,
/// contains the empty trace), suffix set E (nonempty suffixes, seeded with
/// all single symbols), and entries mapping (prefix in S u S.Z, suffix) to
/// the reward tail answering the concatenated query.
///
/// resolveMQ drives the closedness/consistency bookkeeping: once no cell is
/// pending it promotes unmatched extension rows into S and adds
/// distinguishing suffixes until the table is complete or new queries are
/// needed. getMQ returns nullopt exactly when the table is complete.
class ObservationTable {
public:
    ObservationTable(Alphabet alphabet, double rowTolerance = 0.0);

    const Alphabet& alphabet() const { return alphabet_; }

    /// Next pending query (prefix . suffix), or nullopt when complete.
    std::optional<ObservationTrace> getMQ() const;

    /// Records the answer for `query`. Fills every pending cell whose
    /// concatenation equals the query, then reworks closedness/consistency.
    void resolveMQ(const ObservationTrace& query, const RewardTrace& answer);

    bool complete() const;

    /// Hypothesis from the row classes of a complete table.
    MealyRewardMachine buildRewardMachine() const;

    /// Shahbaz-Groz style counterexample ingestion: every nonempty suffix of
    /// obsTrace joins E; affected cells become pending.
    void addCounterExample(const ObservationTrace& obsTrace, const RewardTrace& rewTrace);

    /// Access sequence (S-prefix) representing each hypothesis node, aligned
    /// with buildRewardMachine's node numbering.
    std::vector<ObservationTrace> accessSequences() const;

    /// Replays every filled cell on a machine; true when all answers match.
    bool consistentWith(const MealyRewardMachine& machine) const;

    /// Default reward stamped onto hypotheses (observed null reward).
    void setDefaultReward(double c) { default_reward_ = c; }
    double defaultReward() const { return default_reward_; }

    int numPrefixes() const { return static_cast<int>(prefixes_.size()); }
    int numSuffixes() const { return static_cast<int>(suffixes_.size()); }
    long long numFilledCells() const { return static_cast<long long>(entries_.size()); }

    const std::vector<ObservationTrace>& prefixes() const { return prefixes_; }
    const std::vector<ObservationTrace>& suffixes() const { return suffixes_; }

    /// Human-readable grid: rows = prefixes (S then extensions), columns = suffixes.
    std::string dump() const;

private:
    using Row = std::vector<std::vector<double>>;  // one tail per suffix, in order

    std::vector<ObservationTrace> allPrefixes() const;  // S then S.Z \ S in fixed order
    bool isPrefixInS(const ObservationTrace& p) const;
    bool cellFilled(const ObservationTrace& p, const ObservationTrace& e) const;
    const RewardTrace* cell(const ObservationTrace& p, const ObservationTrace& e) const;
    bool rowComplete(const ObservationTrace& p) const;
    Row rowOf(const ObservationTrace& p) const;
    bool rowsEqual(const Row& a, const Row& b) const;
    bool tailsEqual(const RewardTrace& a, const RewardTrace& b) const;

    /// Promote/extend until queries are pending or the table is complete.
    void rework();

    Alphabet alphabet_;
    double row_tolerance_;
    double default_reward_ = 0.0;
    std::vector<ObservationTrace> prefixes_;  // S, insertion order, prefix-closed
    std::vector<ObservationTrace> suffixes_;  // E, insertion order
    std::map<std::pair<ObservationTrace, ObservationTrace>, RewardTrace> entries_;
};

/// Fills the table against a known target machine (perfect teacher),
/// returning the number of membership queries asked. Test/benchmark helper.
struct PerfectTeacherResult {
    MealyRewardMachine machine;
    long long membershipQueries = 0;
    long long equivalenceQueries = 0;
    long long maxCounterexampleLength = 0;
};
PerfectTeacherResult learnWithPerfectTeacher(const MealyRewardMachine& target,
                                             double rowTolerance = 0.0);

} // namespace mrlearn

#include "mrlearn/lstar.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace mrlearn {

namespace {

ObservationTrace concat(const ObservationTrace& a, const ObservationTrace& b) {
    ObservationTrace out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

std::string traceToString(const ObservationTrace& t, const Alphabet& alphabet) {
    std::string out;
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) out += ".";
        out += alphabet.name(t[i]);
    }
    return out.empty() ? "<eps>" : out;
}

} // namespace

ObservationTable::ObservationTable(Alphabet alphabet, double rowTolerance)
    : alphabet_(std::move(alphabet)), row_tolerance_(rowTolerance) {
    if (alphabet_.size() == 0) throw EmptyAlphabet("observation table needs a nonempty alphabet");
    prefixes_.push_back({});  // epsilon
    for (ObsId z = 0; z < alphabet_.size(); ++z) suffixes_.push_back({z});
}

bool ObservationTable::isPrefixInS(const ObservationTrace& p) const {
    return std::find(prefixes_.begin(), prefixes_.end(), p) != prefixes_.end();
}

std::vector<ObservationTrace> ObservationTable::allPrefixes() const {
    std::vector<ObservationTrace> all = prefixes_;
    for (const auto& s : prefixes_)
        for (ObsId z = 0; z < alphabet_.size(); ++z) {
            ObservationTrace ext = s;
            ext.push_back(z);
            if (!isPrefixInS(ext)) all.push_back(std::move(ext));
        }
    return all;
}

bool ObservationTable::cellFilled(const ObservationTrace& p, const ObservationTrace& e) const {
    return entries_.count({p, e}) > 0;
}

const RewardTrace* ObservationTable::cell(const ObservationTrace& p,
                                          const ObservationTrace& e) const {
    auto it = entries_.find({p, e});
    return it == entries_.end() ? nullptr : &it->second;
}

bool ObservationTable::rowComplete(const ObservationTrace& p) const {
    for (const auto& e : suffixes_)
        if (!cellFilled(p, e)) return false;
    return true;
}

ObservationTable::Row ObservationTable::rowOf(const ObservationTrace& p) const {
    Row row;
    row.reserve(suffixes_.size());
    for (const auto& e : suffixes_) {
        const RewardTrace* tail = cell(p, e);
        if (!tail) throw TableIncomplete("row of " + traceToString(p, alphabet_) + " has holes");
        row.push_back(*tail);
    }
    return row;
}

bool ObservationTable::tailsEqual(const RewardTrace& a, const RewardTrace& b) const {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > row_tolerance_) return false;
    return true;
}

bool ObservationTable::rowsEqual(const Row& a, const Row& b) const {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!tailsEqual(a[i], b[i])) return false;
    return true;
}

std::optional<ObservationTrace> ObservationTable::getMQ() const {
    for (const auto& p : allPrefixes())
        for (const auto& e : suffixes_)
            if (!cellFilled(p, e)) return concat(p, e);
    return std::nullopt;
}

bool ObservationTable::complete() const { return !getMQ().has_value(); }

void ObservationTable::resolveMQ(const ObservationTrace& query, const RewardTrace& answer) {
    if (query.size() != answer.size())
        throw LengthMismatch("answer length " + std::to_string(answer.size()) +
                             " does not match query length " + std::to_string(query.size()));
    for (ObsId z : query)
        if (!alphabet_.validId(z))
            throw UnknownObservation("query symbol outside the table alphabet");

    // Fill every pending cell whose concatenation is this query.
    for (const auto& p : allPrefixes()) {
        if (p.size() > query.size()) continue;
        if (!std::equal(p.begin(), p.end(), query.begin())) continue;
        ObservationTrace e(query.begin() + static_cast<long>(p.size()), query.end());
        if (e.empty()) continue;
        if (std::find(suffixes_.begin(), suffixes_.end(), e) == suffixes_.end()) continue;
        if (cellFilled(p, e)) continue;
        entries_.emplace(std::make_pair(p, e),
                         RewardTrace(answer.end() - static_cast<long>(e.size()), answer.end()));
    }
    rework();
}

void ObservationTable::rework() {
    for (;;) {
        // queries outstanding: nothing to decide yet
        for (const auto& p : allPrefixes())
            if (!rowComplete(p)) return;

        // closedness: every extension row must match some S row
        bool promoted = false;
        for (const auto& p : allPrefixes()) {
            if (isPrefixInS(p)) continue;
            Row row = rowOf(p);
            bool matched = false;
            for (const auto& s : prefixes_)
                if (rowsEqual(row, rowOf(s))) {
                    matched = true;
                    break;
                }
            if (!matched) {
                prefixes_.push_back(p);  // p = s.z with s in S, so S stays prefix-closed
                promoted = true;
                break;
            }
        }
        if (promoted) continue;

        // consistency: prefixes with equal rows must have matching extensions
        bool extended = false;
        for (size_t i = 0; i < prefixes_.size() && !extended; ++i)
            for (size_t j = i + 1; j < prefixes_.size() && !extended; ++j) {
                if (!rowsEqual(rowOf(prefixes_[i]), rowOf(prefixes_[j]))) continue;
                for (ObsId z = 0; z < alphabet_.size() && !extended; ++z) {
                    ObservationTrace pi = prefixes_[i], pj = prefixes_[j];
                    pi.push_back(z);
                    pj.push_back(z);
                    for (size_t k = 0; k < suffixes_.size(); ++k) {
                        const RewardTrace* a = cell(pi, suffixes_[k]);
                        const RewardTrace* b = cell(pj, suffixes_[k]);
                        if (a && b && !tailsEqual(*a, *b)) {
                            ObservationTrace newSuffix{z};
                            newSuffix.insert(newSuffix.end(), suffixes_[k].begin(),
                                             suffixes_[k].end());
                            if (std::find(suffixes_.begin(), suffixes_.end(), newSuffix) ==
                                suffixes_.end()) {
                                suffixes_.push_back(std::move(newSuffix));
                                extended = true;
                                break;
                            }
                        }
                    }
                }
            }
        if (extended) continue;

        return;  // complete
    }
}

MealyRewardMachine ObservationTable::buildRewardMachine() const {
    if (!complete()) throw TableIncomplete("hypothesis requested from an incomplete table");

    // Row classes of S become nodes, in first-occurrence order.
    std::vector<Row> classRows;
    std::vector<size_t> representative;  // class -> index into prefixes_
    std::vector<int> classOf(prefixes_.size());
    for (size_t i = 0; i < prefixes_.size(); ++i) {
        Row row = rowOf(prefixes_[i]);
        int found = -1;
        for (size_t c = 0; c < classRows.size(); ++c)
            if (rowsEqual(classRows[c], row)) {
                found = static_cast<int>(c);
                break;
            }
        if (found < 0) {
            found = static_cast<int>(classRows.size());
            classRows.push_back(std::move(row));
            representative.push_back(i);
        }
        classOf[i] = found;
    }

    const int n = static_cast<int>(classRows.size());
    std::vector<std::vector<int>> next(static_cast<size_t>(n),
                                       std::vector<int>(static_cast<size_t>(alphabet_.size())));
    std::vector<std::vector<double>> out(static_cast<size_t>(n),
                                         std::vector<double>(static_cast<size_t>(alphabet_.size())));
    for (int c = 0; c < n; ++c) {
        const ObservationTrace& s = prefixes_[representative[static_cast<size_t>(c)]];
        for (ObsId z = 0; z < alphabet_.size(); ++z) {
            ObservationTrace ext = s;
            ext.push_back(z);
            Row extRow = rowOf(ext);
            int target = -1;
            for (size_t d = 0; d < classRows.size(); ++d)
                if (rowsEqual(classRows[d], extRow)) {
                    target = static_cast<int>(d);
                    break;
                }
            if (target < 0)
                throw TableIncomplete("table is not closed: row of " +
                                      traceToString(ext, alphabet_) + " matches no S row");
            next[static_cast<size_t>(c)][static_cast<size_t>(z)] = target;
            const RewardTrace* tail = cell(s, {z});
            out[static_cast<size_t>(c)][static_cast<size_t>(z)] = tail->back();
        }
    }
    return MealyRewardMachine(alphabet_, classOf[0], default_reward_, std::move(next),
                              std::move(out));
}

std::vector<ObservationTrace> ObservationTable::accessSequences() const {
    std::vector<Row> classRows;
    std::vector<ObservationTrace> access;
    for (const auto& s : prefixes_) {
        Row row = rowOf(s);
        bool known = false;
        for (const auto& c : classRows)
            if (rowsEqual(c, row)) {
                known = true;
                break;
            }
        if (!known) {
            classRows.push_back(std::move(row));
            access.push_back(s);
        }
    }
    return access;
}

void ObservationTable::addCounterExample(const ObservationTrace& obsTrace,
                                         const RewardTrace& rewTrace) {
    if (obsTrace.size() != rewTrace.size())
        throw LengthMismatch("counterexample observation/reward lengths differ");
    if (obsTrace.empty()) throw NotACounterexample("empty counterexample");
    for (ObsId z : obsTrace)
        if (!alphabet_.validId(z))
            throw UnknownObservation("counterexample symbol outside the table alphabet");

    if (complete()) {
        MealyRewardMachine hyp = buildRewardMachine();
        RewardTrace predicted = hyp.run(obsTrace);
        bool disagrees = false;
        for (size_t i = 0; i < predicted.size(); ++i)
            if (std::abs(predicted[i] - rewTrace[i]) > std::max(row_tolerance_, 1e-9))
                disagrees = true;
        if (!disagrees)
            throw NotACounterexample("hypothesis already reproduces the supplied trace");
    }

    bool addedSuffix = false;
    for (size_t start = 0; start < obsTrace.size(); ++start) {
        ObservationTrace suffix(obsTrace.begin() + static_cast<long>(start), obsTrace.end());
        if (std::find(suffixes_.begin(), suffixes_.end(), suffix) == suffixes_.end()) {
            suffixes_.push_back(std::move(suffix));
            addedSuffix = true;
        }
    }

    if (!addedSuffix) {
        // Every suffix is already known, so suffix refinement is exhausted
        // for this trace. Pin the trace cell-by-cell instead by promoting
        // its prefixes into S; the next hypothesis then reproduces it.
        for (size_t len = 1; len <= obsTrace.size(); ++len) {
            ObservationTrace prefix(obsTrace.begin(), obsTrace.begin() + static_cast<long>(len));
            if (!isPrefixInS(prefix)) prefixes_.push_back(std::move(prefix));
        }
    }
    rework();
}

bool ObservationTable::consistentWith(const MealyRewardMachine& machine) const {
    for (const auto& [key, tail] : entries_) {
        RewardTrace full = machine.run(concat(key.first, key.second));
        RewardTrace replayTail(full.end() - static_cast<long>(tail.size()), full.end());
        for (size_t i = 0; i < tail.size(); ++i)
            if (std::abs(replayTail[i] - tail[i]) > std::max(row_tolerance_, 1e-9)) return false;
    }
    return true;
}

std::string ObservationTable::dump() const {
    std::ostringstream os;
    os << "suffixes:";
    for (const auto& e : suffixes_) os << "  " << traceToString(e, alphabet_);
    os << "\n";
    for (const auto& p : allPrefixes()) {
        os << (isPrefixInS(p) ? "S " : "  ") << traceToString(p, alphabet_) << " |";
        for (const auto& e : suffixes_) {
            os << " ";
            const RewardTrace* tail = cell(p, e);
            if (!tail) {
                os << "?";
                continue;
            }
            for (size_t i = 0; i < tail->size(); ++i) {
                if (i) os << ".";
                os << (*tail)[i];
            }
        }
        os << "\n";
    }
    return os.str();
}

PerfectTeacherResult learnWithPerfectTeacher(const MealyRewardMachine& target,
                                             double rowTolerance) {
    ObservationTable table(target.alphabet(), rowTolerance);
    table.setDefaultReward(target.defaultReward());
    long long mqs = 0;
    long long eqs = 0;
    long long maxCe = 0;
    for (;;) {
        while (auto q = table.getMQ()) {
            table.resolveMQ(*q, target.run(*q));
            ++mqs;
        }
        MealyRewardMachine hyp = table.buildRewardMachine();
        ++eqs;
        auto ce = equivalent(hyp, target);
        if (!ce) return {hyp, mqs, eqs, maxCe};
        maxCe = std::max<long long>(maxCe, static_cast<long long>(ce->size()));
        table.addCounterExample(*ce, target.run(*ce));
    }
}

} // namespace mrlearn

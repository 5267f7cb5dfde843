#include "mrlearn/environments.hpp"

#include <array>
#include <deque>
#include <sstream>

namespace mrlearn {

GridSpec gridFromAscii(const std::string& text) {
    GridSpec spec;
    std::istringstream in(text);
    std::string line;
    bool inLegend = false;
    bool haveStart = false;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (line == "legend:") {
            inLegend = true;
            continue;
        }
        if (inLegend) {
            std::istringstream ls(line);
            std::string cell, symbol;
            if (!(ls >> cell >> symbol) || cell.size() != 1)
                throw ModelParseError("line " + std::to_string(lineNo) +
                                      ": legend entries are '<char> <symbol>'");
            spec.legend[cell[0]] = symbol;
            continue;
        }
        if (spec.width == 0) spec.width = static_cast<int>(line.size());
        if (static_cast<int>(line.size()) != spec.width)
            throw ModelParseError("line " + std::to_string(lineNo) + ": ragged grid row");
        spec.rows.push_back(line);
    }
    spec.height = static_cast<int>(spec.rows.size());
    if (spec.width == 0 || spec.height == 0) throw ModelParseError("empty grid");
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            char c = spec.rows[static_cast<size_t>(y)][static_cast<size_t>(x)];
            if (c == 'S') {
                spec.start_x = x;
                spec.start_y = y;
                haveStart = true;
            } else if (c != '.' && c != '#' && !spec.legend.count(c)) {
                throw ModelParseError(std::string("cell character '") + c +
                                      "' missing from the legend");
            }
        }
    if (!haveStart) throw ModelParseError("grid has no start cell 'S'");
    return spec;
}

std::pair<NrMdp, LabelingFunction> gridMdp(const GridSpec& spec, double apf,
                                           const Alphabet& alphabet) {
    if (!(apf > 0.0 && apf <= 1.0)) throw InvalidApf("action precision factor must be in (0, 1]");

    NrMdp mdp;
    std::vector<std::vector<int>> cellIndex(
        static_cast<size_t>(spec.height), std::vector<int>(static_cast<size_t>(spec.width), -1));
    std::vector<std::pair<int, int>> cells;
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            if (spec.open(x, y)) {
                cellIndex[static_cast<size_t>(y)][static_cast<size_t>(x)] =
                    static_cast<int>(cells.size());
                cells.emplace_back(x, y);
                mdp.state_names.push_back(std::to_string(x) + "_" + std::to_string(y));
            }
    mdp.action_names = {"north", "east", "south", "west"};
    mdp.initial = cellIndex[static_cast<size_t>(spec.start_y)][static_cast<size_t>(spec.start_x)];

    static const std::array<std::pair<int, int>, 4> kMoves{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};
    mdp.trans.assign(cells.size(), std::vector<std::vector<std::pair<int, double>>>(4));
    for (size_t s = 0; s < cells.size(); ++s) {
        auto [x, y] = cells[s];
        for (int a = 0; a < 4; ++a) {
            int nx = x + kMoves[static_cast<size_t>(a)].first;
            int ny = y + kMoves[static_cast<size_t>(a)].second;
            auto& row = mdp.trans[s][static_cast<size_t>(a)];
            if (!spec.open(nx, ny)) {
                row.emplace_back(static_cast<int>(s), 1.0);
            } else {
                int target = cellIndex[static_cast<size_t>(ny)][static_cast<size_t>(nx)];
                row.emplace_back(target, apf);
                if (apf < 1.0) row.emplace_back(static_cast<int>(s), 1.0 - apf);
            }
        }
    }
    mdp.validate();

    LabelingFunction lab(alphabet, 4, static_cast<int>(cells.size()));
    for (size_t s = 0; s < cells.size(); ++s) {
        auto [x, y] = cells[s];
        char c = spec.rows[static_cast<size_t>(y)][static_cast<size_t>(x)];
        auto it = spec.legend.find(c);
        if (it == spec.legend.end()) continue;  // '.', 'S': null
        ObsId z = alphabet.id(it->second);
        for (int a = 0; a < 4; ++a) lab.set(a, static_cast<int>(s), z);
    }
    return {std::move(mdp), std::move(lab)};
}

const std::string& treasureMapAscii() {
    static const std::string map =
        "S.........\n"
        ".1.e....g.\n"
        "..........\n"
        "..........\n"
        ".....2....\n"
        "..........\n"
        "..........\n"
        "..........\n"
        ".m......t.\n"
        "..........\n"
        "legend:\n"
        "m m\n"
        "e e\n"
        "g g\n"
        "t t\n"
        "1 j1\n"
        "2 j2\n";
    return map;
}

MealyRewardMachine treasureMachine(double defaultReward) {
    Alphabet alphabet({"m", "e", "g", "t", "j1", "j2"});
    MachineBuilder b(alphabet, 5, 0, defaultReward);
    b.edge(0, "m", 1, 10.0);
    b.edge(1, "e", 2, 25.0);
    b.edge(1, "g", 2, 25.0);
    b.edge(1, "j1", 3, 60.0);
    b.edge(1, "j2", 3, 60.0);
    b.edge(2, "t", 4, 90.0);
    b.edge(4, "j1", 1, 35.0);
    b.edge(4, "j2", 1, 35.0);
    // node 3 (map sold) absorbs at zero; all unnamed edges self-loop at zero
    return b.build();
}

Domain buildTreasureMap(double apf, double defaultReward) {
    if (!(apf > 0.0 && apf <= 1.0)) throw InvalidApf("action precision factor must be in (0, 1]");
    MealyRewardMachine machine = treasureMachine(defaultReward);
    GridSpec spec = gridFromAscii(treasureMapAscii());
    auto [mdp, lab] = gridMdp(spec, apf, machine.alphabet());
    return Domain{std::move(mdp), std::move(lab), std::move(machine)};
}

namespace {

// Cookie world geometry: three single-cell rooms on a hallway cross.
//   Y p1 B
//      p2
//      R
enum CookiePos { kPosY = 0, kPosP1 = 1, kPosB = 2, kPosP2 = 3, kPosR = 4 };
constexpr int kCookieNone = 0, kCookieBlue = 1, kCookieRed = 2;
constexpr int kAteNone = 0, kAteBlue = 1, kAteRed = 2;

struct CookieState {
    int pos;
    int button;   // latched once pressed
    int cookie;   // kCookieNone / Blue / Red
    int ate;      // room just eaten in, observed as *_crum, cleared next step

    bool operator<(const CookieState& o) const {
        return std::tie(pos, button, cookie, ate) < std::tie(o.pos, o.button, o.cookie, o.ate);
    }
};

std::string cookieStateName(const CookieState& s) {
    static const char* pos[] = {"Y", "p1", "B", "p2", "R"};
    static const char* cook[] = {"-", "B", "R"};
    std::string name = pos[s.pos];
    name += s.button ? "+b" : "-b";
    name += "+c";
    name += cook[s.cookie];
    name += "+j";
    name += cook[s.ate];
    return name;
}

int cookieMove(int pos, int action) {
    // action: 0 north, 1 east, 2 south, 3 west; bumps stay put
    switch (pos) {
        case kPosY: return action == 1 ? kPosP1 : kPosY;
        case kPosP1:
            if (action == 1) return kPosB;
            if (action == 3) return kPosY;
            if (action == 2) return kPosP2;
            return kPosP1;
        case kPosB: return action == 3 ? kPosP1 : kPosB;
        case kPosP2:
            if (action == 0) return kPosP1;
            if (action == 2) return kPosR;
            return kPosP2;
        case kPosR: return action == 0 ? kPosP2 : kPosR;
        default: return pos;
    }
}

} // namespace

MealyRewardMachine cookieMachine() {
    Alphabet alphabet(
        {"blu", "blu_cook", "blu_crum", "red", "red_cook", "red_crum", "yel", "yel_bd"});
    // Nodes follow what an observer of the world can distinguish:
    //   0 idle in yellow (start)   1 idle elsewhere      2 pending, unknown room
    //   3 pending known-red, in B  4 pending known-blue, in R
    //   5 pending known-red, in Y  6 pending known-blue, in Y
    //   7 at the cookie in blue    8 at the cookie in red
    //   9 sink for observation sequences the world cannot produce
    MachineBuilder b(alphabet, 10, 0, 0.0);
    const int A = 0, X = 1, PU = 2, PBKR = 3, PRKB = 4, PYKR = 5, PYKB = 6, EB = 7, ER = 8,
              DEAD = 9;

    auto deadAll = [&](int node, std::initializer_list<const char*> symbols) {
        for (const char* s : symbols) b.edge(node, s, DEAD, 0.0);
    };

    b.edge(A, "yel", A, 0).edge(A, "yel_bd", PU, 0).edge(A, "blu", X, 0).edge(A, "red", X, 0);
    deadAll(A, {"blu_cook", "red_cook", "blu_crum", "red_crum"});

    b.edge(X, "yel", A, 0).edge(X, "blu", X, 0).edge(X, "red", X, 0);
    deadAll(X, {"yel_bd", "blu_cook", "red_cook", "blu_crum", "red_crum"});

    b.edge(PU, "yel", PU, 0).edge(PU, "yel_bd", PU, 0);
    b.edge(PU, "blu", PBKR, 0).edge(PU, "red", PRKB, 0);
    b.edge(PU, "blu_cook", EB, 0).edge(PU, "red_cook", ER, 0);
    deadAll(PU, {"blu_crum", "red_crum"});

    b.edge(PBKR, "blu", PBKR, 0).edge(PBKR, "yel", PYKR, 0).edge(PBKR, "red_cook", ER, 0);
    deadAll(PBKR, {"red", "blu_cook", "yel_bd", "blu_crum", "red_crum"});

    b.edge(PRKB, "red", PRKB, 0).edge(PRKB, "yel", PYKB, 0).edge(PRKB, "blu_cook", EB, 0);
    deadAll(PRKB, {"blu", "red_cook", "yel_bd", "blu_crum", "red_crum"});

    b.edge(PYKR, "yel", PYKR, 0).edge(PYKR, "yel_bd", PU, 0);
    b.edge(PYKR, "blu", PBKR, 0).edge(PYKR, "red_cook", ER, 0);
    deadAll(PYKR, {"red", "blu_cook", "blu_crum", "red_crum"});

    b.edge(PYKB, "yel", PYKB, 0).edge(PYKB, "yel_bd", PU, 0);
    b.edge(PYKB, "red", PRKB, 0).edge(PYKB, "blu_cook", EB, 0);
    deadAll(PYKB, {"blu", "red_cook", "blu_crum", "red_crum"});

    b.edge(EB, "blu_cook", EB, 0).edge(EB, "blu_crum", X, 1.0);
    b.edge(EB, "yel", PYKB, 0).edge(EB, "red", PRKB, 0);
    deadAll(EB, {"blu", "red_cook", "red_crum", "yel_bd"});

    b.edge(ER, "red_cook", ER, 0).edge(ER, "red_crum", X, 1.0);
    b.edge(ER, "yel", PYKR, 0).edge(ER, "blu", PBKR, 0);
    deadAll(ER, {"red", "blu_cook", "blu_crum", "yel_bd"});

    // DEAD keeps the builder's zero self-loops.
    return b.build();
}

Domain buildCookieDomain() {
    MealyRewardMachine machine = cookieMachine();
    const Alphabet& alphabet = machine.alphabet();

    // Flatten (position, button, cookie, just-ate) into explicit states,
    // reachable part only.
    std::map<CookieState, int> index;
    std::vector<CookieState> states;
    std::deque<int> frontier;
    auto intern = [&](const CookieState& cs) {
        auto it = index.find(cs);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(states.size());
        index.emplace(cs, id);
        states.push_back(cs);
        frontier.push_back(id);
        return id;
    };

    const int numActions = 6;  // north east south west press_button eat
    CookieState init{kPosY, 0, kCookieNone, kAteNone};
    intern(init);
    std::vector<std::vector<std::vector<std::pair<int, double>>>> trans;
    while (!frontier.empty()) {
        int id = frontier.front();
        frontier.pop_front();
        CookieState s = states[static_cast<size_t>(id)];
        if (trans.size() <= static_cast<size_t>(id)) trans.resize(states.size());
        trans[static_cast<size_t>(id)].assign(numActions, {});
        for (int a = 0; a < numActions; ++a) {
            auto& row = trans[static_cast<size_t>(id)][static_cast<size_t>(a)];
            if (a < 4) {
                CookieState n{cookieMove(s.pos, a), s.button, s.cookie, kAteNone};
                row.emplace_back(intern(n), 1.0);
            } else if (a == 4) {  // press_button
                if (s.pos == kPosY) {
                    CookieState blue{kPosY, 1, kCookieBlue, kAteNone};
                    CookieState red{kPosY, 1, kCookieRed, kAteNone};
                    row.emplace_back(intern(blue), 0.5);
                    row.emplace_back(intern(red), 0.5);
                } else {
                    CookieState n{s.pos, s.button, s.cookie, kAteNone};
                    row.emplace_back(intern(n), 1.0);
                }
            } else {  // eat
                bool eats = (s.pos == kPosB && s.cookie == kCookieBlue) ||
                            (s.pos == kPosR && s.cookie == kCookieRed);
                CookieState n = eats ? CookieState{s.pos, s.button, kCookieNone,
                                                   s.pos == kPosB ? kAteBlue : kAteRed}
                                     : CookieState{s.pos, s.button, s.cookie, kAteNone};
                row.emplace_back(intern(n), 1.0);
            }
        }
        trans.resize(states.size());
    }

    NrMdp mdp;
    mdp.initial = 0;
    mdp.action_names = {"north", "east", "south", "west", "press_button", "eat"};
    for (const auto& cs : states) mdp.state_names.push_back(cookieStateName(cs));
    mdp.trans = std::move(trans);
    for (auto& perState : mdp.trans)
        if (perState.empty()) perState.assign(numActions, {});
    mdp.validate();

    LabelingFunction lab(alphabet, numActions, mdp.numStates());
    for (int id = 0; id < mdp.numStates(); ++id) {
        const CookieState& cs = states[static_cast<size_t>(id)];
        for (int a = 0; a < numActions; ++a) {
            ObsId z = kNullObs;
            switch (cs.pos) {
                case kPosP1:
                case kPosP2: z = kNullObs; break;
                case kPosY: z = alphabet.id(a == 4 ? "yel_bd" : "yel"); break;
                case kPosB:
                    if (cs.ate == kAteBlue) z = alphabet.id("blu_crum");
                    else if (cs.cookie == kCookieBlue) z = alphabet.id("blu_cook");
                    else z = alphabet.id("blu");
                    break;
                case kPosR:
                    if (cs.ate == kAteRed) z = alphabet.id("red_crum");
                    else if (cs.cookie == kCookieRed) z = alphabet.id("red_cook");
                    else z = alphabet.id("red");
                    break;
            }
            lab.set(a, id, z);
        }
    }

    return Domain{std::move(mdp), std::move(lab), std::move(machine)};
}

Session::Session(const Domain& domain, std::uint64_t seed)
    : domain_(&domain), rng_(seed), state_(domain.mdp.initial), node_(domain.hidden.start()) {}

void Session::reset() {
    state_ = domain_->mdp.initial;
    node_ = domain_->hidden.start();
    ++resets_;
}

Session::Outcome Session::step(int action) {
    int next = sampleTransition(domain_->mdp, state_, action, rng_);
    ObsId z = domain_->labeling(action, next);
    auto [node, reward] = domain_->hidden.step(node_, z);
    state_ = next;
    node_ = node;
    ++actions_;
    return {next, z, reward};
}

void Session::teleport(int state) {
    state_ = state;
}

} // namespace mrlearn

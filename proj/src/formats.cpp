#include "mrlearn/formats.hpp"

#include <fstream>
#include <sstream>

namespace mrlearn {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> splitWs(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parseNumber(const std::string& tok, int lineNo, const char* what) {
    try {
        size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ModelParseError("line " + std::to_string(lineNo) + ": bad " + what + " '" + tok +
                              "'");
    }
}

} // namespace

MealyRewardMachine parseMrm(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    Alphabet alphabet;
    bool haveAlphabet = false;
    std::string startName;
    double defaultReward = 0.0;

    std::vector<std::string> nodeNames;
    std::map<std::string, int> nodeIndex;
    auto internNode = [&](const std::string& name) {
        auto it = nodeIndex.find(name);
        if (it != nodeIndex.end()) return it->second;
        int id = static_cast<int>(nodeNames.size());
        nodeNames.push_back(name);
        nodeIndex.emplace(name, id);
        return id;
    };

    struct Edge {
        int from;
        ObsId symbol;
        int to;
        double reward;
    };
    std::vector<Edge> edges;

    while (std::getline(in, line)) {
        ++lineNo;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("alphabet:", 0) == 0) {
            for (const auto& sym : splitWs(line.substr(9))) alphabet.add(sym);
            if (alphabet.size() == 0)
                throw ModelParseError("line " + std::to_string(lineNo) + ": empty alphabet");
            haveAlphabet = true;
            continue;
        }
        if (line.rfind("start:", 0) == 0) {
            startName = trim(line.substr(6));
            if (startName.empty())
                throw ModelParseError("line " + std::to_string(lineNo) + ": missing start node");
            internNode(startName);
            continue;
        }
        if (line.rfind("default:", 0) == 0) {
            defaultReward = parseNumber(trim(line.substr(8)), lineNo, "default reward");
            continue;
        }
        auto toks = splitWs(line);
        if (toks.size() != 4)
            throw ModelParseError("line " + std::to_string(lineNo) +
                                  ": edges are 'node symbol node reward'");
        if (!haveAlphabet)
            throw ModelParseError("line " + std::to_string(lineNo) +
                                  ": edge before the alphabet declaration");
        if (!alphabet.contains(toks[1]))
            throw ModelParseError("line " + std::to_string(lineNo) + ": unknown symbol '" +
                                  toks[1] + "'");
        edges.push_back({internNode(toks[0]), alphabet.id(toks[1]), internNode(toks[2]),
                         parseNumber(toks[3], lineNo, "reward")});
    }
    if (!haveAlphabet) throw ModelParseError("missing 'alphabet:' header");
    if (startName.empty()) throw ModelParseError("missing 'start:' header");

    MachineBuilder builder(alphabet, static_cast<int>(nodeNames.size()), nodeIndex[startName],
                           defaultReward);
    for (const auto& e : edges) builder.edge(e.from, e.symbol, e.to, e.reward);
    return builder.build();
}

std::string emitMrm(const MealyRewardMachine& machine) {
    std::ostringstream os;
    os << "alphabet:";
    for (const auto& sym : machine.alphabet().symbols()) os << " " << sym;
    os << "\n";
    os << "start: u" << machine.start() << "\n";
    os << "default: " << machine.defaultReward() << "\n";
    std::vector<bool> mentioned(static_cast<size_t>(machine.numNodes()), false);
    mentioned[static_cast<size_t>(machine.start())] = true;
    std::ostringstream edges;
    for (int u = 0; u < machine.numNodes(); ++u)
        for (ObsId z = 0; z < machine.alphabet().size(); ++z) {
            int v = machine.target(u, z);
            double r = machine.output(u, z);
            if (v == u && r == 0.0) continue;  // implicit self-loop
            edges << "u" << u << " " << machine.alphabet().name(z) << " u" << v << " " << r
                  << "\n";
            mentioned[static_cast<size_t>(u)] = true;
            mentioned[static_cast<size_t>(v)] = true;
        }
    // keep otherwise-unmentioned nodes visible so a round trip preserves them
    for (int u = 0; u < machine.numNodes(); ++u)
        if (!mentioned[static_cast<size_t>(u)])
            edges << "u" << u << " " << machine.alphabet().name(0) << " u" << u << " 0\n";
    os << edges.str();
    return os.str();
}

NrMdp parseMdp(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    NrMdp mdp;
    std::map<std::string, int> stateIndex, actionIndex;
    std::string initialName;
    struct Row {
        int s, a, s2;
        double p;
    };
    std::vector<Row> rows;

    while (std::getline(in, line)) {
        ++lineNo;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("states:", 0) == 0) {
            for (const auto& name : splitWs(line.substr(7))) {
                if (stateIndex.count(name))
                    throw ModelParseError("line " + std::to_string(lineNo) +
                                          ": duplicate state '" + name + "'");
                stateIndex.emplace(name, static_cast<int>(mdp.state_names.size()));
                mdp.state_names.push_back(name);
            }
            continue;
        }
        if (line.rfind("actions:", 0) == 0) {
            for (const auto& name : splitWs(line.substr(8))) {
                if (actionIndex.count(name))
                    throw ModelParseError("line " + std::to_string(lineNo) +
                                          ": duplicate action '" + name + "'");
                actionIndex.emplace(name, static_cast<int>(mdp.action_names.size()));
                mdp.action_names.push_back(name);
            }
            continue;
        }
        if (line.rfind("initial:", 0) == 0) {
            initialName = trim(line.substr(8));
            continue;
        }
        auto toks = splitWs(line);
        if (toks.size() != 4)
            throw ModelParseError("line " + std::to_string(lineNo) +
                                  ": transitions are 's a s2 p'");
        if (!stateIndex.count(toks[0]) || !stateIndex.count(toks[2]))
            throw ModelParseError("line " + std::to_string(lineNo) + ": unknown state");
        if (!actionIndex.count(toks[1]))
            throw ModelParseError("line " + std::to_string(lineNo) + ": unknown action '" +
                                  toks[1] + "'");
        rows.push_back({stateIndex[toks[0]], actionIndex[toks[1]], stateIndex[toks[2]],
                        parseNumber(toks[3], lineNo, "probability")});
    }
    if (mdp.state_names.empty()) throw ModelParseError("missing 'states:' header");
    if (mdp.action_names.empty()) throw ModelParseError("missing 'actions:' header");
    if (initialName.empty()) throw ModelParseError("missing 'initial:' header");
    if (!stateIndex.count(initialName))
        throw ModelParseError("initial state '" + initialName + "' not declared");
    mdp.initial = stateIndex[initialName];
    mdp.trans.assign(mdp.state_names.size(),
                     std::vector<std::vector<std::pair<int, double>>>(mdp.action_names.size()));
    for (const auto& r : rows)
        mdp.trans[static_cast<size_t>(r.s)][static_cast<size_t>(r.a)].emplace_back(r.s2, r.p);
    try {
        mdp.validate();
    } catch (const ModelInvalid& e) {
        throw ModelParseError(e.what());
    }
    return mdp;
}

std::string emitMdp(const NrMdp& mdp) {
    std::ostringstream os;
    os << "states:";
    for (const auto& s : mdp.state_names) os << " " << s;
    os << "\nactions:";
    for (const auto& a : mdp.action_names) os << " " << a;
    os << "\ninitial: " << mdp.state_names[static_cast<size_t>(mdp.initial)] << "\n";
    for (int s = 0; s < mdp.numStates(); ++s)
        for (int a = 0; a < mdp.numActions(); ++a)
            for (auto [s2, p] : mdp.trans[static_cast<size_t>(s)][static_cast<size_t>(a)])
                os << mdp.state_names[static_cast<size_t>(s)] << " "
                   << mdp.action_names[static_cast<size_t>(a)] << " "
                   << mdp.state_names[static_cast<size_t>(s2)] << " " << p << "\n";
    return os.str();
}

LabelingFunction parseLabeling(const std::string& text, const Alphabet& alphabet,
                               const NrMdp& mdp) {
    std::map<std::string, int> stateIndex, actionIndex;
    for (int s = 0; s < mdp.numStates(); ++s)
        stateIndex.emplace(mdp.state_names[static_cast<size_t>(s)], s);
    for (int a = 0; a < mdp.numActions(); ++a)
        actionIndex.emplace(mdp.action_names[static_cast<size_t>(a)], a);

    LabelingFunction lab(alphabet, mdp.numActions(), mdp.numStates());
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto toks = splitWs(line);
        if (toks.size() != 3)
            throw ModelParseError("line " + std::to_string(lineNo) + ": labels are 'a s z'");
        if (!actionIndex.count(toks[0]))
            throw ModelParseError("line " + std::to_string(lineNo) + ": unknown action '" +
                                  toks[0] + "'");
        if (!stateIndex.count(toks[1]))
            throw ModelParseError("line " + std::to_string(lineNo) + ": unknown state '" +
                                  toks[1] + "'");
        if (toks[2] != nullObsName() && !alphabet.contains(toks[2]))
            throw ModelParseError("line " + std::to_string(lineNo) + ": unknown symbol '" +
                                  toks[2] + "'");
        lab.set(actionIndex[toks[0]], stateIndex[toks[1]], toks[2]);
    }
    return lab;
}

std::string emitLabeling(const LabelingFunction& lab, const NrMdp& mdp) {
    std::ostringstream os;
    for (int a = 0; a < lab.numActions(); ++a)
        for (int s = 0; s < lab.numStates(); ++s) {
            ObsId z = lab(a, s);
            if (z == kNullObs) continue;
            os << mdp.action_names[static_cast<size_t>(a)] << " "
               << mdp.state_names[static_cast<size_t>(s)] << " " << lab.alphabet().name(z)
               << "\n";
        }
    return os.str();
}

std::map<std::string, std::string> parseKeyValueConfig(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineNo) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineNo) + ": empty key or value");
        out[key] = value;
    }
    return out;
}

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelParseError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void writeFile(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
}

} // namespace mrlearn

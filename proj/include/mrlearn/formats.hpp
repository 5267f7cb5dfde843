#pragma once

#include <map>
#include <string>

#include "mrlearn/machine.hpp"
#include "mrlearn/mdp.hpp"

namespace mrlearn {

/// .mrm text format:
///   alphabet: z1 z2 ...
///   start: u0
///   default: c
///   u z u' r        (one edge per line)
/// Omitted (node, symbol) pairs are implicit zero-reward self-loops.
MealyRewardMachine parseMrm(const std::string& text);
std::string emitMrm(const MealyRewardMachine& machine);

/// Explicit MDP format:
///   states: s1 s2 ...
///   actions: a1 a2 ...
///   initial: s1
///   s a s' p        (one transition per line)
NrMdp parseMdp(const std::string& text);
std::string emitMdp(const NrMdp& mdp);

/// Labeling file: one `a s z` row per labeled pair; z may be "null".
/// Unlisted pairs are null.
LabelingFunction parseLabeling(const std::string& text, const Alphabet& alphabet,
                               const NrMdp& mdp);
std::string emitLabeling(const LabelingFunction& lab, const NrMdp& mdp);

/// key = value configuration text; '#' starts a comment.
std::map<std::string, std::string> parseKeyValueConfig(const std::string& text);

std::string readFile(const std::string& path);
void writeFile(const std::string& path, const std::string& content);

} // namespace mrlearn

#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "alp/data.hpp"
#include "alp/error.hpp"
#include "alp/multiaction.hpp"

namespace alp {

struct Transition {
  std::size_t src;
  ActionMultiset label;
  std::size_t dst;
};

// A labelled transition system over multi-action multisets. `state_values`
// is filled by exploration (canonical value vectors) and left empty for
// systems read from disk or produced by composition.
struct Lts {
  std::size_t num_states = 0;
  std::size_t initial = 0;
  std::vector<Transition> transitions;
  std::vector<std::vector<Value>> state_values;

  std::size_t size() const { return num_states + transitions.size(); }
};

// ---------------------------------------------------------------------------
// Aldebaran format
// ---------------------------------------------------------------------------

inline void write_aut(const Lts& lts, std::ostream& os) {
  os << "des (" << lts.initial << "," << lts.transitions.size() << ","
     << lts.num_states << ")\n";
  for (const auto& t : lts.transitions)
    os << "(" << t.src << ",\"" << to_string(t.label) << "\"," << t.dst << ")\n";
}

inline std::string aut_string(const Lts& lts) {
  std::ostringstream os;
  write_aut(lts, os);
  return os.str();
}

inline void write_states(const Lts& lts, std::ostream& os) {
  for (std::size_t i = 0; i < lts.state_values.size(); ++i) {
    os << i << ": (";
    const auto& vec = lts.state_values[i];
    for (std::size_t j = 0; j < vec.size(); ++j) {
      if (j > 0) os << ",";
      os << to_string(vec[j]);
    }
    os << ")\n";
  }
}

inline std::string states_string(const Lts& lts) {
  std::ostringstream os;
  write_states(lts, os);
  return os.str();
}

inline Lts read_aut(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw Error(Errc::ParseError, "empty .aut input");
  std::size_t init = 0, ntrans = 0, nstates = 0;
  if (std::sscanf(line.c_str(), "des (%zu,%zu,%zu)", &init, &ntrans, &nstates) != 3)
    throw Error(Errc::ParseError, "bad .aut header: " + line);
  Lts lts;
  lts.initial = init;
  lts.num_states = nstates;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t firstq = line.find('"');
    std::size_t lastq = line.rfind('"');
    if (line.front() != '(' || line.back() != ')' || firstq == std::string::npos ||
        lastq == firstq)
      throw Error(Errc::ParseError, "bad .aut transition: " + line);
    std::size_t src = std::stoull(line.substr(1, firstq - 2));
    std::size_t dst = std::stoull(line.substr(lastq + 2, line.size() - lastq - 3));
    std::string label = line.substr(firstq + 1, lastq - firstq - 1);
    if (src >= nstates || dst >= nstates)
      throw Error(Errc::ParseError, "transition endpoint out of range: " + line);
    lts.transitions.push_back({src, parse_multiset_label(label), dst});
  }
  if (lts.initial >= lts.num_states && lts.num_states > 0)
    throw Error(Errc::ParseError, "initial state out of range in .aut header");
  return lts;
}

inline Lts read_aut_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::IoError, "cannot open '" + path + "'");
  return read_aut(is);
}

inline void write_aut_file(const Lts& lts, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::IoError, "cannot write '" + path + "'");
  write_aut(lts, os);
}

inline void write_states_file(const Lts& lts, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::IoError, "cannot write '" + path + "'");
  write_states(lts, os);
}

}  // namespace alp

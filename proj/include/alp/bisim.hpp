#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "alp/lts.hpp"
#include "alp/multiaction.hpp"

namespace alp {

namespace detail {

// Adjacency with interned labels; label ids are assigned in canonical label
// order so the whole procedure is independent of transition input order.
struct RefinementInput {
  std::size_t num_states = 0;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> moves;  // (label, dst)
  std::vector<std::string> label_names;
};

inline RefinementInput make_refinement_input(const std::vector<const Lts*>& parts) {
  RefinementInput in;
  std::map<std::string, std::size_t> label_ids;
  for (const Lts* l : parts)
    for (const auto& t : l->transitions) label_ids.emplace(to_string(t.label), 0);
  std::size_t next = 0;
  for (auto& [name, id] : label_ids) {
    id = next++;
    in.label_names.push_back(name);
  }
  std::size_t offset = 0;
  for (const Lts* l : parts) {
    in.num_states += l->num_states;
    in.moves.resize(in.num_states);
    for (const auto& t : l->transitions)
      in.moves[offset + t.src].emplace_back(label_ids.at(to_string(t.label)),
                                            offset + t.dst);
    offset = in.num_states;
  }
  for (auto& m : in.moves) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  }
  return in;
}

struct RefinementResult {
  std::vector<std::size_t> block_of;
  std::size_t num_blocks = 0;
  std::size_t rounds = 0;
  // Round after which the two probe states first landed in distinct blocks
  // (0 when they never separated or no probes were given).
  std::size_t split_round = 0;
  bool probes_equal = true;
};

// Signature-based refinement to the coarsest strong bisimulation partition.
// Blocks are numbered by first occurrence, i.e. by smallest member index.
inline RefinementResult refine(const RefinementInput& in, std::size_t probe_a = 0,
                               std::size_t probe_b = 0) {
  RefinementResult res;
  res.block_of.assign(in.num_states, 0);
  res.num_blocks = in.num_states == 0 ? 0 : 1;
  if (in.num_states == 0) return res;

  while (true) {
    // Signature: own block plus the set of (label, successor block) pairs,
    // so each round refines the previous partition.
    std::map<std::tuple<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>,
             std::size_t>
        ids;
    std::vector<std::size_t> next_block(in.num_states);
    for (std::size_t s = 0; s < in.num_states; ++s) {
      std::vector<std::pair<std::size_t, std::size_t>> sig;
      sig.reserve(in.moves[s].size());
      for (const auto& [label, dst] : in.moves[s])
        sig.emplace_back(label, res.block_of[dst]);
      std::sort(sig.begin(), sig.end());
      sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
      auto key = std::make_tuple(res.block_of[s], std::move(sig));
      auto [it, inserted] = ids.emplace(std::move(key), ids.size());
      next_block[s] = it->second;
    }
    ++res.rounds;
    bool stable = ids.size() == res.num_blocks;
    res.block_of = std::move(next_block);
    res.num_blocks = ids.size();
    if (res.probes_equal && res.block_of[probe_a] != res.block_of[probe_b]) {
      res.probes_equal = false;
      res.split_round = res.rounds;
    }
    if (stable) break;
  }
  return res;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Minimisation
// ---------------------------------------------------------------------------

struct MinimiseResult {
  Lts quotient;
  std::vector<std::size_t> block_of;  // original state -> quotient state
};

// Quotient modulo strong bisimilarity. Deterministic: blocks are numbered by
// smallest member state and quotient transitions are sorted.
inline MinimiseResult minimise(const Lts& lts) {
  detail::RefinementInput in = detail::make_refinement_input({&lts});
  detail::RefinementResult ref = detail::refine(in);

  MinimiseResult out;
  out.block_of = ref.block_of;
  out.quotient.num_states = ref.num_blocks;
  out.quotient.initial = lts.num_states == 0 ? 0 : ref.block_of[lts.initial];

  std::set<std::tuple<std::size_t, std::string, std::size_t>> seen;
  std::vector<std::pair<std::tuple<std::size_t, std::string, std::size_t>,
                        const ActionMultiset*>>
      collected;
  for (const auto& t : lts.transitions) {
    auto key = std::make_tuple(ref.block_of[t.src], to_string(t.label),
                               ref.block_of[t.dst]);
    if (seen.insert(key).second) collected.emplace_back(key, &t.label);
  }
  std::sort(collected.begin(), collected.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [key, label] : collected)
    out.quotient.transitions.push_back(
        {std::get<0>(key), *label, std::get<2>(key)});
  return out;
}

// ---------------------------------------------------------------------------
// Equivalence checking
// ---------------------------------------------------------------------------

struct BisimVerdict {
  bool bisimilar = false;
  // For a negative verdict: the refinement round that separated the two
  // initial states, a measure of distinguishing depth.
  std::size_t depth = 0;
};

inline BisimVerdict bisimilar(const Lts& a, const Lts& b) {
  if (a.num_states == 0 || b.num_states == 0)
    return {a.num_states == b.num_states, 0};
  detail::RefinementInput in = detail::make_refinement_input({&a, &b});
  detail::RefinementResult ref =
      detail::refine(in, a.initial, a.num_states + b.initial);
  if (ref.probes_equal) return {true, 0};
  return {false, ref.split_round};
}

}  // namespace alp

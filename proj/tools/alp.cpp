// Command line front end: explore, cleave, compose, minimise, compare,
// invariant and pipeline over .alp / .aut / .ctx files.
//
// Exit codes: 0 success, 1 usage or parse failure, 2 exploration failure,
// 3 validation failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "alp/bisim.hpp"
#include "alp/cleave.hpp"
#include "alp/compose.hpp"
#include "alp/explore.hpp"
#include "alp/invariant.hpp"
#include "alp/lts.hpp"
#include "alp/parser.hpp"
#include "alp/pipeline.hpp"
#include "alp/render.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitExploration = 2;
constexpr int kExitValidation = 3;

int exit_code_for(const alp::Error& e) {
  switch (e.code()) {
    case alp::Errc::StateLimitExceeded:
    case alp::Errc::UnboundedSum:
    case alp::Errc::DomainTooLarge:
      return kExitExploration;
    default:
      return kExitUsage;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw alp::Error(alp::Errc::IoError, "cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw alp::Error(alp::Errc::IoError, "cannot write '" + path + "'");
  os << content;
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::string current;
  for (char c : csv) {
    if (c == ',') {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      current += c;
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

struct SpecArgs {
  std::string path;
  bool allow_generated = false;
};

alp::ParsedSpec load_spec(const SpecArgs& args) {
  alp::ParserOptions opts;
  opts.allow_generated = args.allow_generated;
  return alp::parse_spec(read_file(args.path), opts);
}

// Resolves the invariant to use: an explicit --invariant expression wins,
// otherwise the spec's own inv clause applies unless suppressed.
alp::ExprPtr select_invariant(const alp::ParsedSpec& spec, const std::string& flag_expr,
                              bool no_invariant) {
  if (no_invariant) return nullptr;
  if (!flag_expr.empty()) return alp::parse_invariant_expr(flag_expr, spec.lpe);
  return spec.inv;
}

nlohmann::ordered_json entry_json(const alp::CheckEntry& e) {
  nlohmann::ordered_json j;
  j["pass"] = e.pass;
  j["reason"] = e.pass ? "ok" : e.reason;
  return j;
}

nlohmann::ordered_json report_json(const alp::CleaveReport& report,
                                   const std::optional<alp::SemanticReport>& semantic) {
  nlohmann::ordered_json j;
  j["REQ1"]["all"] = entry_json(report.req1);
  auto fill = [](nlohmann::ordered_json& out,
                 const std::map<std::size_t, alp::CheckEntry>& entries) {
    out = nlohmann::ordered_json::object();
    for (const auto& [i, e] : entries) out[std::to_string(i)] = entry_json(e);
  };
  fill(j["REQ2"], report.req2);
  fill(j["REQ3"], report.req3);
  fill(j["REQ4"], report.req4);
  if (semantic) {
    fill(j["REQ3_semantic"], semantic->req3);
    fill(j["REQ4_semantic"], semantic->req4);
  }
  return j;
}

void print_lts_metrics(const alp::Lts& lts) {
  std::cout << "states=" << lts.num_states << " transitions=" << lts.transitions.size()
            << "\n";
}

int cmd_explore(const SpecArgs& spec_args, const std::string& out,
                const alp::ExploreLimits& limits) {
  alp::ParsedSpec spec = load_spec(spec_args);
  alp::Lts lts = alp::explore(spec.lpe, spec.init, limits);
  print_lts_metrics(lts);
  if (!out.empty()) {
    std::ostringstream aut, states;
    alp::write_aut(lts, aut);
    alp::write_states(lts, states);
    write_file(out, aut.str());
    std::string sidecar = out;
    if (sidecar.size() > 4 && sidecar.substr(sidecar.size() - 4) == ".aut")
      sidecar = sidecar.substr(0, sidecar.size() - 4);
    write_file(sidecar + ".states", states.str());
  }
  return 0;
}

int cmd_cleave(const SpecArgs& spec_args, const std::string& left_csv,
               const std::string& right_csv, const std::string& mode_name,
               const std::string& inv_expr, bool no_invariant, bool deadlock_free,
               const std::string& check, std::uint64_t nat_bound,
               const std::string& out_dir) {
  alp::ParsedSpec spec = load_spec(spec_args);
  alp::Partition partition = alp::partition_from_names(spec.lpe, split_names(left_csv),
                                                       split_names(right_csv));
  alp::CleaveMode mode =
      mode_name == "naive" ? alp::CleaveMode::Naive : alp::CleaveMode::Reduced;
  alp::ExprPtr invariant = select_invariant(spec, inv_expr, no_invariant);

  if (invariant != nullptr) {
    alp::InvariantVerdict verdict =
        alp::check_invariant(spec.lpe, invariant, nat_bound);
    if (!verdict.holds) {
      std::cerr << "error: the supplied expression is not a state invariant: "
                << verdict.counterexample << "\n";
      return kExitValidation;
    }
  }

  alp::CleaveOutcome outcome =
      alp::run_cleave(spec.lpe, spec.init, partition, mode, invariant, deadlock_free);

  alp::CleaveReport report = alp::check_cleave_syntactic(spec.lpe, outcome.plan);
  std::optional<alp::SemanticReport> semantic;
  if (check == "semantic")
    semantic = alp::check_cleave_semantic(spec.lpe, outcome.plan, nat_bound);

  std::filesystem::create_directories(out_dir);
  auto in_dir = [&](const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  write_file(in_dir("left.alp"), alp::render_lpe(outcome.left, outcome.left_init));
  write_file(in_dir("right.alp"), alp::render_lpe(outcome.right, outcome.right_init));
  write_file(in_dir("composition.ctx"), alp::render_ctx(outcome.context) + "\n");
  write_file(in_dir("report.json"), report_json(report, semantic).dump(2) + "\n");

  bool pass = report.all_pass() && (!semantic || semantic->all_pass());
  std::cout << "cleave: wrote left.alp right.alp composition.ctx report.json to "
            << out_dir << "\n"
            << "checks: " << (pass ? "pass" : "FAIL") << "\n";
  return pass ? 0 : kExitValidation;
}

int cmd_compose(const std::string& ctx_path, const std::string& out,
                const alp::ExploreLimits& limits) {
  alp::ContextPtr ctx = alp::parse_ctx(read_file(ctx_path));
  std::vector<std::string> leaf_ids;
  alp::collect_leaves(ctx, leaf_ids);
  std::map<std::string, alp::Lts> components;
  std::filesystem::path base = std::filesystem::path(ctx_path).parent_path();
  for (const auto& id : leaf_ids)
    components.emplace(id, alp::read_aut_file((base / id).string()));
  alp::Lts lts = alp::compose(ctx, components, limits);
  print_lts_metrics(lts);
  if (!out.empty()) write_file(out, alp::aut_string(lts));
  return 0;
}

int cmd_minimise(const std::string& aut_path, const std::string& out) {
  alp::Lts lts = alp::read_aut_file(aut_path);
  alp::MinimiseResult result = alp::minimise(lts);
  print_lts_metrics(result.quotient);
  if (!out.empty()) write_file(out, alp::aut_string(result.quotient));
  return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path) {
  alp::Lts a = alp::read_aut_file(a_path);
  alp::Lts b = alp::read_aut_file(b_path);
  alp::BisimVerdict verdict = alp::bisimilar(a, b);
  if (verdict.bisimilar) {
    std::cout << "BISIMILAR\n";
    return 0;
  }
  std::cout << "NOT BISIMILAR (distinguished in round " << verdict.depth << ")\n";
  return kExitValidation;
}

int cmd_invariant(const SpecArgs& spec_args, const std::string& inv_expr,
                  std::uint64_t nat_bound, const std::string& mode_name,
                  const alp::ExploreLimits& limits) {
  alp::ParsedSpec spec = load_spec(spec_args);
  alp::ExprPtr invariant = select_invariant(spec, inv_expr, false);
  if (invariant == nullptr) {
    std::cerr << "error: no invariant given (--invariant or an inv clause)\n";
    return kExitUsage;
  }
  alp::InvariantMode mode = mode_name == "reachable" ? alp::InvariantMode::Reachable
                                                     : alp::InvariantMode::Global;
  alp::InvariantVerdict verdict =
      alp::check_invariant(spec.lpe, invariant, nat_bound, mode, spec.init, limits);
  if (verdict.holds) {
    std::cout << "invariant holds (" << mode_name << ")\n";
    return 0;
  }
  std::cout << "invariant violated: " << verdict.counterexample << "\n";
  return kExitValidation;
}

int cmd_pipeline(const SpecArgs& spec_args, const std::string& left_csv,
                 const std::string& right_csv, const std::string& mode_name,
                 const std::string& inv_expr, bool no_invariant,
                 std::uint64_t nat_bound, const alp::ExploreLimits& limits) {
  alp::ParsedSpec spec = load_spec(spec_args);
  alp::Partition partition = alp::partition_from_names(spec.lpe, split_names(left_csv),
                                                       split_names(right_csv));
  alp::CleaveMode mode =
      mode_name == "naive" ? alp::CleaveMode::Naive : alp::CleaveMode::Reduced;
  alp::ExprPtr invariant = select_invariant(spec, inv_expr, no_invariant);

  if (invariant != nullptr) {
    alp::InvariantVerdict verdict = alp::check_invariant(spec.lpe, invariant, nat_bound);
    if (!verdict.holds) {
      std::cerr << "error: the supplied expression is not a state invariant: "
                << verdict.counterexample << "\n";
      return kExitValidation;
    }
  }

  alp::PipelineResult result =
      alp::run_pipeline(spec.lpe, spec.init, partition, mode, invariant, limits);

  std::cout << "model          states  transitions  min_states  min_transitions\n";
  for (const auto& row : result.rows) {
    std::cout << row.name;
    for (std::size_t pad = row.name.size(); pad < 15; ++pad) std::cout << ' ';
    std::string cells[4] = {std::to_string(row.states), std::to_string(row.transitions),
                            std::to_string(row.min_states),
                            std::to_string(row.min_transitions)};
    std::size_t widths[4] = {6, 11, 10, 15};
    for (int c = 0; c < 4; ++c) {
      for (std::size_t pad = cells[c].size(); pad < widths[c]; ++pad) std::cout << ' ';
      std::cout << cells[c];
      if (c < 3) std::cout << "  ";
    }
    std::cout << "\n";
  }
  std::cout << "verdict: " << (result.bisim ? "BISIMILAR" : "NOT BISIMILAR") << "\n";
  return result.bisim ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear process exploration, cleaving and compositional checking"};
  app.require_subcommand(1);

  SpecArgs spec_args;
  alp::ExploreLimits limits;
  std::uint64_t nat_bound = 4;
  std::string out, out_dir = ".", left_csv, right_csv;
  std::string mode_name = "reduced", check = "syntactic", inv_mode = "global";
  std::string inv_expr, path_a, path_b;
  bool no_invariant = false, deadlock_free = false;
  std::optional<std::uint64_t> nat_sum_bound;

  auto add_spec = [&](CLI::App* cmd) {
    cmd->add_option("spec", spec_args.path, "specification file (.alp)")->required();
    cmd->add_flag("--allow-generated", spec_args.allow_generated,
                  "accept generated labels containing '#'");
  };
  auto add_limits = [&](CLI::App* cmd) {
    cmd->add_option("--max-states", limits.max_states, "state limit (default 10000000)");
    cmd->add_option("--nat-sum-bound", nat_sum_bound,
                    "fallback range for unbounded Nat sum variables");
  };

  CLI::App* explore = app.add_subcommand("explore", "generate a state space");
  add_spec(explore);
  add_limits(explore);
  explore->add_option("--out", out, "write .aut (plus .states sidecar)");

  CLI::App* cleave = app.add_subcommand("cleave", "split a process in two components");
  add_spec(cleave);
  cleave->add_option("--left", left_csv, "comma separated left parameter names")
      ->required();
  cleave->add_option("--right", right_csv, "comma separated right parameter names")
      ->required();
  cleave->add_option("--mode", mode_name, "naive|reduced (default reduced)");
  cleave->add_option("--invariant", inv_expr, "state invariant expression");
  cleave->add_flag("--no-invariant", no_invariant, "ignore the spec's inv clause");
  cleave->add_flag("--deadlock-free", deadlock_free,
                   "apply the invariant to the update expressions");
  cleave->add_option("--check", check, "syntactic|semantic (default syntactic)");
  cleave->add_option("--nat-bound", nat_bound,
                     "bound for Nat domains in checks (default 4)");
  cleave->add_option("--out-dir", out_dir, "output directory (default .)");

  CLI::App* compose = app.add_subcommand("compose", "evaluate a composition context");
  compose->add_option("ctx", path_a, "context file (.ctx)")->required();
  add_limits(compose);
  compose->add_option("--out", out, "write the composed .aut");

  CLI::App* minimise = app.add_subcommand("minimise", "reduce modulo strong bisimilarity");
  minimise->add_option("aut", path_a, "transition system (.aut)")->required();
  minimise->add_option("--out", out, "write the quotient .aut");

  CLI::App* compare = app.add_subcommand("compare", "check strong bisimilarity");
  compare->add_option("aut1", path_a, "first .aut")->required();
  compare->add_option("aut2", path_b, "second .aut")->required();

  CLI::App* invariant = app.add_subcommand("invariant", "check a state invariant");
  add_spec(invariant);
  add_limits(invariant);
  invariant->add_option("--invariant", inv_expr, "invariant expression");
  invariant->add_option("--nat-bound", nat_bound,
                        "bound for Nat domains (default 4)");
  invariant->add_option("--mode", inv_mode, "global|reachable (default global)");

  CLI::App* pipeline = app.add_subcommand(
      "pipeline", "explore, cleave, compose minimised components and compare");
  add_spec(pipeline);
  add_limits(pipeline);
  pipeline->add_option("--left", left_csv, "comma separated left parameter names")
      ->required();
  pipeline->add_option("--right", right_csv, "comma separated right parameter names")
      ->required();
  pipeline->add_option("--mode", mode_name, "naive|reduced (default reduced)");
  pipeline->add_option("--invariant", inv_expr, "state invariant expression");
  pipeline->add_flag("--no-invariant", no_invariant, "ignore the spec's inv clause");
  pipeline->add_option("--nat-bound", nat_bound,
                       "bound for Nat domains in checks (default 4)");

  CLI11_PARSE(app, argc, argv);

  limits.nat_sum_bound = nat_sum_bound;

  try {
    if (explore->parsed()) return cmd_explore(spec_args, out, limits);
    if (cleave->parsed())
      return cmd_cleave(spec_args, left_csv, right_csv, mode_name, inv_expr,
                        no_invariant, deadlock_free, check, nat_bound, out_dir);
    if (compose->parsed()) return cmd_compose(path_a, out, limits);
    if (minimise->parsed()) return cmd_minimise(path_a, out);
    if (compare->parsed()) return cmd_compare(path_a, path_b);
    if (invariant->parsed())
      return cmd_invariant(spec_args, inv_expr, nat_bound, inv_mode, limits);
    if (pipeline->parsed())
      return cmd_pipeline(spec_args, left_csv, right_csv, mode_name, inv_expr,
                          no_invariant, nat_bound, limits);
  } catch (const alp::Error& e) {
    std::cerr << "error [" << alp::errc_name(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

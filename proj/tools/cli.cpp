#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pncgames/bell_bridge.hpp"
#include "pncgames/catalog.hpp"
#include "pncgames/classical_bound.hpp"
#include "pncgames/io.hpp"
#include "pncgames/quantum_eval.hpp"
#include "pncgames/seesaw.hpp"

namespace pnc::cli {

using nlohmann::json;

std::string fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

constexpr double kDefaultTol = 1e-9;
constexpr double kBridgeTol = 1e-10;
constexpr double kMixedTol = 1e-12;
constexpr int kSimulationCap = 64;
constexpr int kAutoEnumerateInputs = 16;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<double> tol;
  std::uint64_t seed = 0;
  std::string output;
  bool timing = false;

  double tol_or(double fallback) const { return tol.value_or(fallback); }
};

class Report {
 public:
  Report(std::string command, const std::vector<std::string>& args) {
    j_["command"] = std::move(command);
    j_["args"] = args;
    j_["inputs"] = json::object();
    j_["values"] = json::object();
    j_["checks"] = json::array();
    j_["files"] = json::object();
  }

  json& root() { return j_; }

  void input(const std::string& label, const std::string& path, const std::string& text) {
    j_["inputs"][label] = {{"path", path}, {"fnv1a64", fnv1a64(text)}, {"bytes", text.size()}};
  }

  json& value(const std::string& name, double v, const std::string& source) {
    json& e = j_["values"][name];
    e["value"] = v;
    e["source"] = source;
    summary_ << "  " << name << " = " << fmt(v) << "  [" << source << "]\n";
    return e;
  }

  void check(const std::string& name, bool passed, const std::string& source, json detail = json::object()) {
    detail["name"] = name;
    detail["passed"] = passed;
    detail["source"] = source;
    j_["checks"].push_back(std::move(detail));
    summary_ << "  " << (passed ? "PASS " : "FAIL ") << name << "  [" << source << "]\n";
    all_passed_ = all_passed_ && passed;
  }

  void file(const std::string& label, const std::string& path) {
    j_["files"][label] = path;
    summary_ << "  wrote " << label << ": " << path << "\n";
  }

  void note(const std::string& text) { summary_ << "  " << text << "\n"; }

  bool passed() const { return all_passed_; }
  std::string summary() const { return summary_.str(); }

  static std::string fmt(double v) {
    std::ostringstream s;
    s.precision(12);
    s << v;
    return s.str();
  }

 private:
  json j_;
  std::ostringstream summary_;
  bool all_passed_ = true;
};

json encoding_json(const ClassicalStrategy& s) {
  json dec = json::array();
  for (int m = 0; m < s.decoding.rows(); ++m) {
    json row = json::array();
    for (int y = 0; y < s.decoding.cols(); ++y) row.push_back(s.decoding(m, y));
    dec.push_back(std::move(row));
  }
  return {{"alphabet_size", s.alphabet_size}, {"encoding", s.encoding}, {"decoding", dec}};
}

void report_bound(Report& r, const std::string& name, const BoundResult& b, const std::string& mode) {
  json& e = r.value(name, b.value, "classical-bound.pnc_bound");
  e["mode"] = mode;
  e["max_alphabet"] = b.max_alphabet;
  e["nodes"] = b.nodes;
  e["saturated"] = b.saturated;
  if (b.exact_value) e["exact"] = b.exact_value->str();
  e["witness"] = encoding_json(b.witness);
}

SearchMode parse_mode(const std::string& m) {
  if (m == "bnb" || m == "branch_and_bound") return SearchMode::branch_and_bound;
  if (m == "exact") return SearchMode::exact;
  throw UsageError("--mode must be bnb or exact");
}

struct SeesawFlags {
  int dim = 0;
  int restarts = 50;
  double eps = 1e-9;
  int max_iters = 2000;
  std::string strategy_out;
  std::string trace_out;
};

void add_seesaw_flags(CLI::App* app, SeesawFlags& f) {
  app->add_option("--dim", f.dim, "Hilbert space dimension")->check(CLI::Range(1, 64));
  app->add_option("--restarts", f.restarts, "random restarts")->check(CLI::Range(1, 1000000));
  app->add_option("--eps", f.eps, "stop when an iteration gains less than this")->check(CLI::PositiveNumber);
  app->add_option("--max-iters", f.max_iters, "iterations per restart")->check(CLI::Range(1, 10000000));
  app->add_option("--strategy-out", f.strategy_out, "write the best strategy here");
  app->add_option("--trace-out", f.trace_out, "write the convergence trace CSV here");
}

void run_seesaw(Report& r, const Game& g, const SeesawFlags& f, const Globals& glob,
                std::optional<double> classical) {
  SeesawConfig cfg;
  cfg.dim = f.dim;
  cfg.restarts = f.restarts;
  cfg.eps = f.eps;
  cfg.max_iters = f.max_iters;
  cfg.rng_seed = glob.seed;
  const auto res = seesaw(g, cfg);
  json& e = r.value("seesaw", res.value, "seesaw.seesaw");
  e["dim"] = cfg.dim;
  e["restarts"] = cfg.restarts;
  e["seed"] = cfg.rng_seed;
  e["best_restart"] = res.best_restart;
  e["iterations"] = res.restarts[res.best_restart].iterations;
  int failed = 0;
  for (const auto& rs : res.restarts) failed += rs.valid ? 0 : 1;
  e["failed_restarts"] = failed;
  if (classical) e["exceeds_classical"] = res.value > *classical;
  const auto obl = check_quantum_obliviousness(g, res.strategy, glob.tol_or(kDefaultTol));
  r.check("seesaw_strategy_oblivious", obl.passed, "quantum-eval.check_quantum_obliviousness",
          {{"max_deviation", obl.max_deviation}, {"tol", glob.tol_or(kDefaultTol)}});
  if (!f.strategy_out.empty()) {
    io::save_strategy(res.strategy, f.strategy_out);
    r.file("strategy", f.strategy_out);
  }
  if (!f.trace_out.empty()) {
    io::write_file(f.trace_out, seesaw_trace_csv(res.trace));
    r.file("trace", f.trace_out);
  }
}

std::string load_text(Report& r, const std::string& label, const std::string& path) {
  std::string text = io::read_file(path);
  r.input(label, path, text);
  return text;
}

// --- subcommands ----------------------------------------------------------

struct RacFlags {
  int n = 0;
  int d = 0;
  bool enumerate = false;
  std::string mode = "bnb";
  int max_alphabet = 0;
  bool seesaw = false;
  std::string game_out;
  SeesawFlags ss;
};

void cmd_rac(Report& r, const RacFlags& f, const Globals& glob) {
  const Game g = build_rac({f.n, f.d});
  r.root()["game"] = {{"alice_inputs", g.alice_inputs}, {"bob_inputs", g.bob_inputs},
                      {"partitions", g.partitions.size()}};
  if (!f.game_out.empty()) {
    io::save_game(g, f.game_out);
    r.file("game", f.game_out);
  }
  const Rational analytic = rac_pnc_bound({f.n, f.d});
  r.value("analytic_bound", analytic.to_double(), "games-catalog.rac_pnc_bound")["exact"] = analytic.str();

  if (f.enumerate || g.alice_inputs <= kAutoEnumerateInputs) {
    BoundOptions opts;
    opts.mode = parse_mode(f.mode);
    opts.max_alphabet = f.max_alphabet;
    const auto b = pnc_bound(g, opts);
    report_bound(r, "enumerated_bound", b, f.mode);
    const bool eq = b.exact_value ? (*b.exact_value == analytic)
                                  : std::abs(b.value - analytic.to_double()) <= glob.tol_or(kDefaultTol);
    r.check("enumerated_equals_analytic", eq, "classical-bound.pnc_bound",
            {{"exact_comparison", b.exact_value.has_value()}});
  } else {
    r.note("enumeration skipped (pass --enumerate to force)");
  }
  if (f.seesaw) {
    SeesawFlags ss = f.ss;
    if (ss.dim == 0) ss.dim = f.d;
    run_seesaw(r, g, ss, glob, analytic.to_double());
  }
}

struct CglmpFlags {
  int d = 0;
  std::vector<double> schmidt;
  bool simulate = false;
  bool enumerate = false;
  int sim_cap = kSimulationCap;
  std::string game_out;
  std::string strategy_out;
};

void cmd_cglmp(Report& r, const CglmpFlags& f, const Globals& glob) {
  const int d = f.d;
  const bool maximally_entangled = f.schmidt.empty();
  if (!maximally_entangled && static_cast<int>(f.schmidt.size()) != d) {
    throw UsageError("--schmidt needs exactly d coefficients");
  }
  if (f.simulate && d > f.sim_cap) {
    throw std::invalid_argument("simulation requested for d = " + std::to_string(d) + " beyond the cap " +
                                std::to_string(f.sim_cap) + " (raise --sim-cap)");
  }
  const CglmpSpec spec{d, maximally_entangled ? std::vector<double>(d, 1.0) : f.schmidt};
  const double bound = cglmp_pnc_bound(d).to_double();
  r.value("classical_bound", bound, "games-catalog.cglmp_pnc_bound")["exact"] = cglmp_pnc_bound(d).str();
  const double formula = cglmp_value_formula(spec);
  r.value("formula_value", formula, "games-catalog.cglmp_value_formula");
  if (maximally_entangled) {
    const double mixed = cglmp_mixed_value(d);
    r.value("mixed_value", mixed, "games-catalog.cglmp_mixed_value");
    r.check("formula_matches_mixed_closed_form", std::abs(formula - mixed) <= glob.tol_or(kDefaultTol),
            "games-catalog.cglmp_mixed_value", {{"difference", std::abs(formula - mixed)}});
  }
  r.check("exceeds_classical_bound", formula > bound, "games-catalog.cglmp_value_formula");

  const bool build = d <= f.sim_cap;
  if (build) {
    const Game g = build_cglmp_game(d);
    const QuantumStrategy qs = cglmp_quantum_strategy(spec);
    if (!f.game_out.empty()) {
      io::save_game(g, f.game_out);
      r.file("game", f.game_out);
    }
    if (!f.strategy_out.empty()) {
      io::save_strategy(qs, f.strategy_out);
      r.file("strategy", f.strategy_out);
    }
    const auto obl = check_quantum_obliviousness(g, qs, glob.tol_or(kDefaultTol));
    r.check("oblivious", obl.passed, "quantum-eval.check_quantum_obliviousness",
            {{"max_deviation", obl.max_deviation}});
    if (maximally_entangled) {
      const double tol = glob.tol_or(kMixedTol);
      r.check("cell_averages_maximally_mixed", obl.max_distance_to_mixed <= tol,
              "quantum-eval.check_quantum_obliviousness",
              {{"max_distance_to_mixed", obl.max_distance_to_mixed}, {"tol", tol}});
    }
    if (f.simulate) {
      const double sim = quantum_performance(g, qs);
      r.value("simulated_value", sim, "quantum-eval.quantum_performance");
      r.check("formula_matches_simulation", std::abs(sim - formula) <= glob.tol_or(kDefaultTol),
              "quantum-eval.quantum_performance", {{"difference", std::abs(sim - formula)}});
    }
    if (f.enumerate) {
      BoundOptions opts;
      opts.max_alphabet = d;
      const auto b = pnc_bound(g, opts);
      report_bound(r, "enumerated_bound", b, "bnb");
      const bool eq = b.exact_value ? (*b.exact_value == cglmp_pnc_bound(d))
                                    : std::abs(b.value - bound) <= glob.tol_or(kDefaultTol);
      r.check("enumerated_equals_classical_bound", eq, "classical-bound.pnc_bound");
    }
  } else {
    r.note("d above --sim-cap: game and strategy not built; certification uses the closed form only");
    if (f.enumerate) throw std::invalid_argument("enumeration requested beyond --sim-cap");
  }
}

struct BridgeFlags {
  std::string scenario;
  std::string setup;
  bool enumerate = false;
  std::string game_out;
  std::string strategy_out;
};

void cmd_bridge(Report& r, const BridgeFlags& f, const Globals& glob) {
  const BellScenario s = io::parse_scenario(load_text(r, "scenario", f.scenario), f.scenario);
  const BipartiteQuantumSetup setup = io::parse_setup(load_text(r, "setup", f.setup), f.setup);
  setup.validate_for(s);
  const Game g = bridge_game(s);
  r.root()["game"] = {{"alice_inputs", g.alice_inputs}, {"bob_inputs", g.bob_inputs}, {"tasks", g.num_tasks()}};
  if (!f.game_out.empty()) {
    io::save_game(g, f.game_out);
    r.file("game", f.game_out);
  }

  const double bell = bell_value(s, setup);
  r.value("bell_value", bell, "bell-bridge.bell_value");
  const auto st = steer_states(setup);
  r.value("max_marginal_deviation", st.max_marginal_deviation, "bell-bridge.steer_states");
  QuantumStrategy qs{setup.dim_b, st.states, setup.bob_measurements};
  if (!f.strategy_out.empty()) {
    io::save_strategy(qs, f.strategy_out);
    r.file("strategy", f.strategy_out);
  }
  const double perf = quantum_performance(g, qs);
  r.value("game_performance", perf, "quantum-eval.quantum_performance");
  const double diff = std::abs(bell - perf);
  r.value("difference", diff, "bell-bridge.bell_value");
  const double tol = glob.tol_or(kBridgeTol);
  r.check("bridge_equality", diff <= tol, "bell-bridge.bell_value", {{"tol", tol}});
  const auto obl = check_quantum_obliviousness(g, qs, tol);
  r.check("steered_oblivious", obl.passed, "quantum-eval.check_quantum_obliviousness",
          {{"max_deviation", obl.max_deviation}, {"tol", tol}});

  std::optional<double> bound;
  if (s.classical_bound) {
    r.value("supplied_classical_bound", *s.classical_bound, "bell-bridge.BellScenario");
  }
  if (f.enumerate) {
    BoundOptions opts;
    opts.max_alphabet = s.d;
    const auto b = pnc_bound(g, opts);
    report_bound(r, "enumerated_bound", b, "bnb");
    const auto sweep = sweep_group_strategies(s);
    json& e = r.value("group_sweep_bound", sweep.best, "bell-bridge.sweep_group_strategies");
    e["a"] = sweep.best_a;
    e["b"] = sweep.best_b;
    r.check("enumeration_matches_group_sweep", std::abs(b.value - sweep.best) <= glob.tol_or(kDefaultTol),
            "classical-bound.pnc_bound");
    if (s.classical_bound) {
      r.check("supplied_bound_confirmed", std::abs(*s.classical_bound - b.value) <= glob.tol_or(kDefaultTol),
              "classical-bound.pnc_bound");
    }
    bound = b.value;
  } else if (s.classical_bound) {
    bound = s.classical_bound;
  }
  if (bound) r.root()["values"]["bell_value"]["exceeds_classical"] = bell > *bound + glob.tol_or(kDefaultTol);
}

struct EvalFlags {
  std::string game;
  std::string strategy;
};

void cmd_eval(Report& r, const EvalFlags& f, const Globals& glob) {
  const Game g = io::parse_game(load_text(r, "game", f.game), f.game);
  const QuantumStrategy qs = io::parse_strategy(load_text(r, "strategy", f.strategy), f.strategy);
  r.value("performance", quantum_performance(g, qs), "quantum-eval.quantum_performance");
  const double tol = glob.tol_or(kDefaultTol);
  const auto obl = check_quantum_obliviousness(g, qs, tol);
  r.value("max_obliviousness_deviation", obl.max_deviation, "quantum-eval.check_quantum_obliviousness");
  r.check("oblivious", obl.passed, "quantum-eval.check_quantum_obliviousness", {{"tol", tol}});
}

struct BoundFlags {
  std::string game;
  std::string mode = "bnb";
  int max_alphabet = 0;
};

void cmd_bound(Report& r, const BoundFlags& f, const Globals&) {
  const Game g = io::parse_game(load_text(r, "game", f.game), f.game);
  BoundOptions opts;
  opts.mode = parse_mode(f.mode);
  opts.max_alphabet = f.max_alphabet;
  const auto b = pnc_bound(g, opts);
  report_bound(r, "bound", b, f.mode);
  r.check("witness_balanced", is_balanced(g, b.witness), "classical-bound.is_balanced");
}

struct SeesawCmdFlags {
  std::string game;
  bool init_classical = false;
  SeesawFlags ss;
};

void cmd_seesaw(Report& r, const SeesawCmdFlags& f, const Globals& glob) {
  const Game g = io::parse_game(load_text(r, "game", f.game), f.game);
  SeesawFlags ss = f.ss;
  if (ss.dim == 0) ss.dim = g.num_outcomes;
  run_seesaw(r, g, ss, glob, std::nullopt);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Preparation-noncontextuality games: bounds, quantum values, see-saw, Bell bridge", "pnc"};
  app.require_subcommand(1);
  // Global flags may also follow the subcommand.
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Expand all help");
  Globals glob;
  app.add_option("--tol", glob.tol, "tolerance for every comparison check (default per check)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", glob.seed, "seed for randomized steps (default 0)");
  app.add_option("--output", glob.output, "also write the JSON report to this file");
  app.add_flag("--timing", glob.timing, "include wall time in the report (breaks byte stability)");

  RacFlags rac;
  auto* rac_cmd = app.add_subcommand("rac", "parity-oblivious random access code");
  rac_cmd->add_option("--n", rac.n, "string length (>= 2)")->required()->check(CLI::Range(2, 64));
  rac_cmd->add_option("--d", rac.d, "alphabet size (>= 2)")->required()->check(CLI::Range(2, 4096));
  rac_cmd->add_flag("--enumerate", rac.enumerate, "compute the bound by search even for large games");
  rac_cmd->add_option("--mode", rac.mode, "search mode: bnb or exact");
  rac_cmd->add_option("--max-alphabet", rac.max_alphabet, "message alphabet cap")->check(CLI::Range(1, 4096));
  rac_cmd->add_flag("--seesaw", rac.seesaw, "run the see-saw lower bound");
  rac_cmd->add_option("--game-out", rac.game_out, "write the game file here");
  add_seesaw_flags(rac_cmd, rac.ss);

  CglmpFlags cg;
  auto* cg_cmd = app.add_subcommand("cglmp", "CGLMP game and its closed-form quantum strategy");
  cg_cmd->add_option("--d", cg.d, "number of outcomes (>= 2)")->required()->check(CLI::Range(2, 100000));
  cg_cmd->add_option("--schmidt", cg.schmidt, "Schmidt coefficients (default all equal)")->delimiter(',');
  cg_cmd->add_flag("--simulate", cg.simulate, "cross-check the closed form by Born-rule simulation");
  cg_cmd->add_flag("--enumerate", cg.enumerate, "compute the classical bound at alphabet d by search");
  cg_cmd->add_option("--sim-cap", cg.sim_cap, "largest d for which matrices are built")->check(CLI::Range(2, 1000));
  cg_cmd->add_option("--game-out", cg.game_out, "write the game file here");
  cg_cmd->add_option("--strategy-out", cg.strategy_out, "write the strategy file here");

  BridgeFlags br;
  auto* br_cmd = app.add_subcommand("bridge", "Bell value versus steered communication-game performance");
  br_cmd->add_option("--scenario", br.scenario, "Bell scenario file")->required();
  br_cmd->add_option("--setup", br.setup, "bipartite setup file")->required();
  br_cmd->add_flag("--enumerate", br.enumerate, "recompute the classical bound at alphabet d");
  br_cmd->add_option("--game-out", br.game_out, "write the bridged game file here");
  br_cmd->add_option("--strategy-out", br.strategy_out, "write the steered strategy file here");

  EvalFlags ev;
  auto* ev_cmd = app.add_subcommand("eval", "evaluate a quantum strategy on a game");
  ev_cmd->add_option("--game", ev.game, "game file")->required();
  ev_cmd->add_option("--strategy", ev.strategy, "strategy file")->required();

  BoundFlags bd;
  auto* bd_cmd = app.add_subcommand("bound", "preparation-noncontextual bound of a game");
  bd_cmd->add_option("--game", bd.game, "game file")->required();
  bd_cmd->add_option("--mode", bd.mode, "search mode: bnb or exact");
  bd_cmd->add_option("--max-alphabet", bd.max_alphabet, "message alphabet cap")->check(CLI::Range(1, 4096));

  SeesawCmdFlags sw;
  auto* sw_cmd = app.add_subcommand("seesaw", "see-saw lower bound on the oblivious quantum value");
  sw_cmd->add_option("--game", sw.game, "game file")->required();
  add_seesaw_flags(sw_cmd, sw.ss);

  std::vector<const char*> argv{"pnc"};
  for (const auto& a : args) argv.push_back(a.c_str());

  auto emit = [&](Report& r, int code) {
    r.root()["passed"] = code == kExitPass;
    r.root()["exit_code"] = code;
    const std::string text = r.root().dump(2) + "\n";
    out << text;
    if (!glob.output.empty()) {
      try {
        io::write_file(glob.output, text);
      } catch (const std::exception& e) {
        err << "pnc: " << e.what() << "\n";
        return kExitError;
      }
    }
    return code;
  };

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    Report r("", args);
    r.root()["error"] = {{"kind", "usage"}, {"message", e.what()}};
    err << "pnc: usage error: " << e.what() << "\n" << "Run with --help for usage.\n";
    return emit(r, kExitUsage);
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Report r(name, args);
  r.root()["seed"] = glob.seed;
  if (glob.tol) r.root()["tol"] = *glob.tol;
  const auto t0 = std::chrono::steady_clock::now();
  int code = kExitPass;
  try {
    if (name == "rac") cmd_rac(r, rac, glob);
    else if (name == "cglmp") cmd_cglmp(r, cg, glob);
    else if (name == "bridge") cmd_bridge(r, br, glob);
    else if (name == "eval") cmd_eval(r, ev, glob);
    else if (name == "bound") cmd_bound(r, bd, glob);
    else if (name == "seesaw") cmd_seesaw(r, sw, glob);
    code = r.passed() ? kExitPass : kExitCheckFailed;
  } catch (const UsageError& e) {
    r.root()["error"] = {{"kind", "usage"}, {"message", e.what()}};
    err << "pnc " << name << ": usage error: " << e.what() << "\n";
    return emit(r, kExitUsage);
  } catch (const std::exception& e) {
    r.root()["error"] = {{"kind", "error"}, {"message", e.what()}};
    err << "pnc " << name << ": error: " << e.what() << "\n";
    return emit(r, kExitError);
  }
  if (glob.timing) {
    r.root()["timing_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  err << "pnc " << name << (code == kExitPass ? ": all checks passed" : ": some checks FAILED") << "\n"
      << r.summary();
  return emit(r, code);
}

}  // namespace pnc::cli

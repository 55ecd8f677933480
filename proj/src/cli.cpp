#include "og/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "og/frontend.hpp"

namespace og {

namespace {

struct Options {
  std::string model;
  std::vector<std::string> invariants;
  std::optional<std::uint64_t> max_states;
  std::optional<std::uint32_t> max_depth;
  std::string variant;
  std::string events_mode;
  std::string syscall_wait;
  std::uint64_t seed = 0;
  std::size_t steps = 1000;
  int verbosity = 0;
  std::string out;
  bool no_simplify = false;
  std::uint32_t users = 2, interrupts = 1, events = 1;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

std::string underscore(std::string s) {
  for (auto& c : s)
    if (c == '-') c = '_';
  return s;
}

void apply_overrides(ModelFile& m, const Options& o) {
  if (!o.variant.empty()) m.set_config("variant", o.variant);
  if (!o.events_mode.empty()) m.set_config("events_mode", underscore(o.events_mode));
  if (!o.syscall_wait.empty()) m.set_config("syscall_wait", o.syscall_wait);
  if (o.max_states) m.set_config("max_states", std::to_string(*o.max_states));
  if (o.max_depth) m.set_config("max_depth", std::to_string(*o.max_depth));
}

LoadedModel load(const Options& o) {
  auto text = read_file(o.model);
  try {
    auto m = parse_model_file(text);
    apply_overrides(m, o);
    return elaborate(m);
  } catch (const ParseError& e) {
    throw UsageError(o.model + ":" + std::to_string(e.pos().line) + ":" + std::to_string(e.pos().col) + ": " +
                     to_string(e.kind()) + ": " + e.reason());
  }
}

std::vector<NamedInvariant> select(const LoadedModel& lm, const std::vector<std::string>& names) {
  if (names.empty()) return lm.invariants;
  std::vector<NamedInvariant> out;
  for (const auto& n : names) {
    auto it = std::find_if(lm.invariants.begin(), lm.invariants.end(), [&](const auto& i) { return i.name == n; });
    if (it == lm.invariants.end()) throw UsageError("unknown invariant " + n);
    out.push_back(*it);
  }
  return out;
}

Limits limits_of(const System& sys) {
  Limits l;
  l.max_states = sys.config.state_limit;
  l.max_depth = sys.config.depth_limit;
  return l;
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty())
    out << text;
  else
    write_file(o.out, text);
}

int run_check(const Options& o, std::ostream& out) {
  auto lm = load(o);
  auto report = explore(lm.system, select(lm, o.invariants), limits_of(lm.system));
  std::string text = serialize_check_report(lm.system, report);
  std::vector<std::pair<std::string, std::string>> traces;
  for (const auto& v : report.violations)
    traces.emplace_back(v.invariant, serialize_trace(v.trace, o.verbosity, &lm.system));
  for (const auto& e : report.model_errors)
    traces.emplace_back(e.kind + "." + e.task + "." + e.label, serialize_trace(e.trace, o.verbosity, &lm.system));
  if (o.out.empty()) {
    out << text;
    for (const auto& [name, t] : traces) out << "\n# trace " << name << '\n' << t;
  } else {
    write_file(o.out, text);
    auto stem = std::filesystem::path(o.out).replace_extension().string();
    for (const auto& [name, t] : traces) write_file(stem + "." + name + ".ogt", t);
  }
  if (!report.violations.empty() || !report.model_errors.empty()) return kExitFindings;
  return report.terminated ? kExitOk : kExitLimit;
}

int run_vcs(const Options& o, std::ostream& out) {
  auto lm = load(o);
  VcOptions opts;
  opts.simplify = !o.no_simplify;
  VcResult r;
  try {
    r = run_vc_pipeline(lm.system, opts);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  } catch (const UnboundedDomain& e) {
    throw UsageError(e.what());
  }
  emit(o, out, vc_report(lm.system, r));
  if (r.interference.failed + r.sequential.failed) return kExitFindings;
  return r.interference.unknown + r.sequential.unknown ? kExitLimit : kExitOk;
}

int run_simulate(const Options& o, std::ostream& out) {
  auto lm = load(o);
  auto t = random_walk(lm.system, o.seed, o.steps);
  emit(o, out, serialize_trace(t, o.verbosity, &lm.system));
  return kExitOk;
}

int run_graph(const Options& o, std::ostream& out) {
  auto lm = load(o);
  auto l = limits_of(lm.system);
  l.keep_graph = true;
  auto report = explore(lm.system, {}, l);
  emit(o, out, export_dot(lm.system, report, o.verbosity));
  return report.terminated ? kExitOk : kExitLimit;
}

int run_preset(const Options& o, std::ostream& out) {
  SystemConfig cfg;
  cfg.nb_users = o.users;
  cfg.nb_ints = o.interrupts;
  cfg.nb_events = o.events;
  auto m = preset_model(cfg);
  try {
    apply_overrides(m, o);
    elaborate(m);
  } catch (const ParseError& e) {
    throw UsageError(e.reason());
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  emit(o, out, print_model(m));
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Controlled Owicki-Gries workbench", "ogcheck"};
  app.require_subcommand(1);
  const std::vector<std::string> variants{"arm", "generic"};
  const std::vector<std::string> modes{"add-one", "any-superset"};
  const std::vector<std::string> waits{"clear", "literal"};

  auto model_opts = [&](CLI::App* sub) {
    sub->add_option("model", o.model, "Model file (.og)")->required();
    sub->add_option("--max-states", o.max_states, "State budget");
    sub->add_option("--max-depth", o.max_depth, "Depth bound");
    sub->add_option("--variant", o.variant, "Hardware variant")->check(CLI::IsMember(variants));
    sub->add_option("--events-mode", o.events_mode, "Event change semantics")->check(CLI::IsMember(modes));
    sub->add_option("--syscall-wait", o.syscall_wait, "Syscall wait loop")->check(CLI::IsMember(waits));
    sub->add_option("--out", o.out, "Output file");
    sub->add_option("--verbosity", o.verbosity, "Trace and graph detail (0-2)")->check(CLI::Range(0, 2));
  };

  auto* check = app.add_subcommand("check", "Explore the state space and check invariants");
  model_opts(check);
  check->add_option("--invariant", o.invariants, "Invariant to check (repeatable)");

  auto* vcs = app.add_subcommand("vcs", "Generate and discharge verification conditions");
  model_opts(vcs);
  vcs->add_flag("--no-simplify", o.no_simplify, "Skip trivial-VC elimination");

  auto* sim = app.add_subcommand("simulate", "Seeded random walk");
  model_opts(sim);
  sim->add_option("--seed", o.seed, "Random seed");
  sim->add_option("--steps", o.steps, "Maximum steps");

  auto* graph = app.add_subcommand("graph", "Export the reachable state graph as DOT");
  model_opts(graph);

  auto* preset = app.add_subcommand("preset", "Print the eChronos preset model");
  preset->add_option("--users", o.users, "Number of user tasks")->check(CLI::Range(1, 56));
  preset->add_option("--interrupts", o.interrupts, "Number of interrupt routines")->check(CLI::Range(0, 56));
  preset->add_option("--events", o.events, "Number of events")->check(CLI::Range(0, 60));
  preset->add_option("--variant", o.variant, "Hardware variant")->check(CLI::IsMember(variants));
  preset->add_option("--events-mode", o.events_mode, "Event change semantics")->check(CLI::IsMember(modes));
  preset->add_option("--syscall-wait", o.syscall_wait, "Syscall wait loop")->check(CLI::IsMember(waits));
  preset->add_option("--max-states", o.max_states, "State budget");
  preset->add_option("--max-depth", o.max_depth, "Depth bound");
  preset->add_option("--out", o.out, "Output file");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*check) return run_check(o, out);
    if (*vcs) return run_vcs(o, out);
    if (*sim) return run_simulate(o, out);
    if (*graph) return run_graph(o, out);
    return run_preset(o, out);
  } catch (const UsageError& e) {
    err << "ogcheck: " << e.what() << '\n';
  } catch (const ConfigError& e) {
    err << "ogcheck: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace og

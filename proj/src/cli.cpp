#include "tse/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include "tse/core.hpp"
#include "tse/sampling.hpp"
#include "tse/scenario.hpp"
#include "tse/table_io.hpp"

namespace tse::cli {
namespace {

// Flags (no value) that may also appear as key=true in a --config file.
const std::vector<std::string> kBooleanKeys = {"allow-exploratory", "simulate",
                                               "demo"};

struct Options {
  // shared
  std::string v_text;
  bool allow_exploratory = false;
  std::string format = "csv";
  std::string out_path;
  std::string config_path;
  std::size_t threads = 0;
  // simulate / stochastic
  std::string init_text;
  std::size_t steps = 100;
  std::string mode = "raw";
  // classify / sweep
  std::size_t coordinate = 0;
  std::optional<double> p_initial;
  // sweep
  bool demo = false;
  std::string cells_text;
  std::string v0_range, v1_range, v2_range;
  bool simulate = false;
  double tol = 1e-12;
  std::size_t max_steps = 100000;
  double agreement_tol = 1e-6;
  // stochastic
  std::string volumes_text;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  std::string trajectories_path;
};

/// Everything a command produces; written only once the command succeeded.
struct Output {
  std::string data;
  std::vector<std::pair<std::string, std::string>> files;
};

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorKind::InvalidArgument, msg);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = text.find(sep, begin);
    parts.push_back(text.substr(begin, end == std::string::npos
                                           ? std::string::npos
                                           : end - begin));
    if (end == std::string::npos) return parts;
    begin = end + 1;
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Triple parse_triple(const std::string& text, const char* what) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) {
    invalid(std::string(what) + " needs three comma-separated numbers, got '" +
            text + "'");
  }
  Triple t{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto v = parse_double(trim(parts[i]));
    if (!v || !std::isfinite(*v)) {
      invalid(std::string(what) + ": cannot parse '" + parts[i] + "'");
    }
    t[i] = *v;
  }
  return t;
}

std::vector<std::uint64_t> parse_volumes(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(text, ',')) {
    const std::string p = trim(part);
    std::uint64_t n = 0;
    const auto res = std::from_chars(p.data(), p.data() + p.size(), n);
    if (p.empty() || res.ec != std::errc() || res.ptr != p.data() + p.size()) {
      invalid("sample volume must be a positive integer, got '" + part + "'");
    }
    if (n < 1) invalid("sample volume must be >= 1");
    out.push_back(n);
  }
  return out;
}

DirectingParams params_from(const Options& o, std::ostream& err) {
  const ParamCheck check =
      o.allow_exploratory ? ParamCheck::AllowExploratory : ParamCheck::Strict;
  DirectingParams p(parse_triple(o.v_text, "--v"), check);
  if (p.exploratory()) {
    err << "warning: exploratory parameters outside |v_m| <= 1\n";
  }
  return p;
}

std::string render(const CsvTable& table, const std::string& format) {
  return format == "json" ? to_json(table) : to_csv(table);
}

std::string render_object(const CsvTable& table, const std::string& format) {
  if (format != "json") return to_csv(table);
  // Single-row results print as one object rather than a one-element array.
  std::string arr = to_json(table);
  const auto open = arr.find('{');
  const auto close = arr.rfind('}');
  std::string obj = arr.substr(open, close - open + 1);
  // Undo the array's extra indentation level.
  std::string flat;
  for (std::size_t i = 0; i < obj.size(); ++i) {
    flat += obj[i];
    if (obj[i] == '\n' && obj.compare(i + 1, 2, "  ") == 0) i += 2;
  }
  return flat + "\n";
}

// Writes via a sibling temporary so a failed run never leaves a partial file.
void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) invalid("cannot open '" + tmp + "' for writing");
    f << content;
    f.flush();
    if (!f) invalid("failed writing '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    invalid("cannot move output into place at '" + path + "'");
  }
}

std::string with_volume_suffix(const std::string& path, std::uint64_t n) {
  const std::filesystem::path p(path);
  std::filesystem::path out = p;
  out.replace_filename(p.stem().string() + ".n" + std::to_string(n) +
                       p.extension().string());
  return out.string();
}

// ---------------------------------------------------------------------------
// Commands

Output cmd_equilibrium(const Options& o, std::ostream& err) {
  const DirectingParams params = params_from(o, err);
  const Equilibrium eq = compute_equilibrium(params);
  CsvTable t;
  t.header = {"rho0", "rho1", "rho2", "v", "v_bar", "flags"};
  t.rows.push_back({format_double(eq[0]), format_double(eq[1]),
                    format_double(eq[2]), format_double(eq.v_denominator()),
                    eq.has_v_bar() ? format_double(eq.v_bar()) : "",
                    params.exploratory() ? "exploratory" : ""});
  return {render_object(t, o.format), {}};
}

Output cmd_simulate(const Options& o, std::ostream& err) {
  const DirectingParams params = params_from(o, err);
  const RawState init(parse_triple(o.init_text, "--init"));
  const StepMode mode = o.mode == "clamped" ? StepMode::Clamped : StepMode::Raw;
  const auto states = trajectory(params, init, o.steps, mode);
  if (mode == StepMode::Raw) {
    for (std::size_t k = 0; k < states.size(); ++k) {
      if (!states[k].in_unit_cube()) {
        err << "warning: raw trajectory leaves [0, 1] at k = " << k << "\n";
        break;
      }
    }
  }
  return {render(trajectory_table(states), o.format), {}};
}

Output cmd_classify(const Options& o, std::ostream& err) {
  const DirectingParams params = params_from(o, err);
  if (o.coordinate > 2) invalid("--m must be 0, 1 or 2");
  std::optional<double> start = o.p_initial;
  if (!o.init_text.empty()) {
    if (start) invalid("give either --p0 or --init, not both");
    start = SimplexPoint(parse_triple(o.init_text, "--init"))[o.coordinate];
  }
  if (start && !(*start >= 0.0 && *start <= 1.0)) {
    invalid("initial probability must lie in [0, 1]");
  }

  const ScenarioReport r = classify(params, o.coordinate);
  std::string limit = "0|1";
  std::vector<std::string> flags;
  if (params.exploratory()) flags.emplace_back("exploratory");
  if (r.predicted_limit.is_conditional()) flags.emplace_back("conditional");
  if (!r.predicted_limit.is_conditional()) {
    limit = format_double(r.predicted_limit.value());
  } else if (start && r.predicted_limit.resolvable(*start)) {
    limit = format_double(r.predicted_limit.resolve(*start));
  } else if (start) {
    flags.emplace_back("unresolved");
  }
  std::string flag_text;
  for (const auto& f : flags) flag_text += (flag_text.empty() ? "" : ";") + f;

  CsvTable t;
  t.header = {"coordinate", "scenario", "rho_m", "v_m", "predicted_limit",
              "contraction_factor", "flags"};
  t.rows.push_back({std::to_string(r.coordinate), to_string(r.scenario),
                    format_double(r.rho_m), format_double(r.v_m), limit,
                    format_double(r.contraction_factor), flag_text});
  return {render_object(t, o.format), {}};
}

ParameterGrid grid_from(const Options& o) {
  const bool ranges =
      !o.v0_range.empty() || !o.v1_range.empty() || !o.v2_range.empty();
  const int sources = int(o.demo) + int(!o.cells_text.empty()) + int(ranges);
  if (sources != 1) {
    invalid("give exactly one grid: --demo, --cells, or --v0/--v1/--v2");
  }
  if (o.demo) return ParameterGrid::four_scenario_demo();
  if (!o.cells_text.empty()) {
    std::vector<Triple> cells;
    for (const auto& c : split(o.cells_text, ';')) {
      if (trim(c).empty()) continue;
      cells.push_back(parse_triple(c, "--cells"));
    }
    return ParameterGrid::explicit_cells(std::move(cells));
  }
  if (o.v0_range.empty() || o.v1_range.empty() || o.v2_range.empty()) {
    invalid("--v0, --v1 and --v2 must all be given");
  }
  return ParameterGrid::cartesian(ValueRange::parse(o.v0_range),
                                  ValueRange::parse(o.v1_range),
                                  ValueRange::parse(o.v2_range));
}

Output cmd_sweep(const Options& o, std::ostream&) {
  SweepOptions opt;
  if (o.coordinate > 2) invalid("--m must be 0, 1 or 2");
  if (!(o.tol > 0.0) || !(o.agreement_tol > 0.0) || o.max_steps < 1) {
    invalid("--tol and --agreement-tol must be > 0, --max-steps >= 1");
  }
  opt.coordinate = o.coordinate;
  if (!o.init_text.empty()) opt.init = SimplexPoint(parse_triple(o.init_text, "--init"));
  opt.simulate = o.simulate;
  opt.limit_tol = o.tol;
  opt.max_steps = o.max_steps;
  opt.agreement_tol = o.agreement_tol;
  opt.param_check =
      o.allow_exploratory ? ParamCheck::AllowExploratory : ParamCheck::Strict;
  opt.max_threads = o.threads;
  const ParameterGrid grid = grid_from(o);
  return {render(sweep_table(sweep(grid, opt)), o.format), {}};
}

Output cmd_stochastic(const Options& o, std::ostream& err) {
  const DirectingParams params = params_from(o, err);
  const SimplexPoint init(parse_triple(o.init_text, "--init"));
  const auto volumes = parse_volumes(o.volumes_text);
  SampleConfig cfg;
  cfg.sample_volume = volumes.front();
  cfg.replications = o.reps;
  cfg.seed = o.seed;
  cfg.steps = o.steps;
  cfg.validate();

  auto replications_for = [&](std::uint64_t n) {
    SampleConfig c = cfg;
    c.sample_volume = n;
    auto runs = run_replications(params, init, c, o.threads);
    for (const auto& run : runs) {
      if (!run.ok()) {
        err << "warning: replication " << run.replication << " (n = " << n
            << ") stopped: " << *run.error << "\n";
      }
    }
    return runs;
  };

  Output result;
  if (volumes.size() == 1) {
    result.data =
        render(replication_table(replications_for(volumes.front())), o.format);
    return result;
  }
  const auto table = lln_diagnostic(params, init, volumes, cfg, o.threads);
  result.data = render(deviation_table(table), o.format);
  if (!o.trajectories_path.empty()) {
    for (const std::uint64_t n : volumes) {
      result.files.emplace_back(
          with_volume_suffix(o.trajectories_path, n),
          render(replication_table(replications_for(n)), o.format));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// --config handling: key=value lines become flags unless already given.

std::vector<std::string> apply_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (path.empty()) return kept;

  std::ifstream in(path);
  if (!in) invalid("cannot read config file '" + path + "'");
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    for (const auto& a : kept) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };

  std::vector<std::string> injected;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      invalid("config line " + std::to_string(lineno) + " is not key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key.empty() || key == "config" || given(key)) continue;
    const bool boolean =
        std::find(kBooleanKeys.begin(), kBooleanKeys.end(), key) !=
        kBooleanKeys.end();
    if (boolean) {
      if (value == "true" || value == "1" || value == "yes") {
        injected.push_back("--" + key);
      } else if (value != "false" && value != "0" && value != "no") {
        invalid("config key '" + key + "' expects true or false");
      }
    } else {
      injected.push_back("--" + key + "=" + value);
    }
  }
  // Options belong to the subcommand, so splice them in right after it.
  std::vector<std::string> out;
  if (kept.size() < 2) {
    out = kept;
    out.insert(out.end(), injected.begin(), injected.end());
    return out;
  }
  out.assign(kept.begin(), kept.begin() + 2);
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), kept.begin() + 2, kept.end());
  return out;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return kInvalidInput;
    case ErrorKind::NoEquilibrium: return kNoEquilibrium;
    case ErrorKind::DegenerateClamp: return kDegenerateClamp;
    case ErrorKind::BoundaryCase: return kBoundaryCase;
    case ErrorKind::UnresolvedPrediction: return kInvalidInput;
  }
  return kInternalError;
}

void add_shared(CLI::App* sub, Options& o, bool with_params = true) {
  if (with_params) {
    sub->add_option("--v", o.v_text, "directing parameters v0,v1,v2")
        ->required();
    sub->add_flag("--allow-exploratory", o.allow_exploratory,
                  "accept |v_m| > 1 (rows are flagged)");
  }
  sub->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", o.out_path, "output file (default: stdout)");
  sub->add_option("--config", o.config_path,
                  "key=value file mirroring the flags; flags win");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  std::vector<std::string> argv_text;
  try {
    argv_text = apply_config(args);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }

  Options o;
  CLI::App app{"Ternary statistical experiment dynamics: equilibria, "
               "trajectories, scenario classification, sweeps and "
               "finite-sample runs."};
  app.require_subcommand(1, 1);

  auto* eq = app.add_subcommand("equilibrium", "closed-form equilibrium rho");
  add_shared(eq, o);

  auto* sim = app.add_subcommand("simulate", "iterate the dynamics");
  add_shared(sim, o);
  sim->add_option("--init", o.init_text, "initial state p0,p1,p2")->required();
  sim->add_option("--steps", o.steps, "number of steps");
  sim->add_option("--mode", o.mode, "raw or clamped")
      ->check(CLI::IsMember({"raw", "clamped"}));

  auto* cls = app.add_subcommand("classify", "limit scenario of one coordinate");
  add_shared(cls, o);
  cls->add_option("--m", o.coordinate, "coordinate 0, 1 or 2");
  cls->add_option("--p0", o.p_initial,
                  "initial value P_m(0) of the classified coordinate");
  cls->add_option("--init", o.init_text, "full initial state p0,p1,p2");

  auto* swp = app.add_subcommand("sweep", "scenario table over a grid");
  add_shared(swp, o, false);
  swp->add_flag("--allow-exploratory", o.allow_exploratory,
                "accept |v_m| > 1 (rows are flagged)");
  swp->add_flag("--demo", o.demo, "one cell per scenario");
  swp->add_option("--cells", o.cells_text, "explicit cells a,b,c;d,e,f");
  swp->add_option("--v0", o.v0_range, "value or start:stop:step");
  swp->add_option("--v1", o.v1_range, "value or start:stop:step");
  swp->add_option("--v2", o.v2_range, "value or start:stop:step");
  swp->add_option("--m", o.coordinate, "coordinate 0, 1 or 2");
  swp->add_option("--init", o.init_text, "initial state (default uniform)");
  swp->add_flag("--simulate", o.simulate, "add simulated limits");
  swp->add_option("--tol", o.tol, "increment tolerance for limits");
  swp->add_option("--max-steps", o.max_steps, "step cap for limits");
  swp->add_option("--agreement-tol", o.agreement_tol,
                  "allowed |simulated - predicted|");
  swp->add_option("--threads", o.threads, "worker threads (0 = auto)");

  auto* sto = app.add_subcommand("stochastic", "finite sample volume runs");
  add_shared(sto, o);
  sto->add_option("--init", o.init_text, "initial state p0,p1,p2")->required();
  sto->add_option("--n", o.volumes_text, "sample volume(s), comma separated")
      ->required();
  sto->add_option("--reps", o.reps, "replications");
  sto->add_option("--seed", o.seed, "master seed");
  sto->add_option("--steps", o.steps, "number of steps")->default_val(10);
  sto->add_option("--trajectories", o.trajectories_path,
                  "with several volumes: write per-volume trajectories here");
  sto->add_option("--threads", o.threads, "worker threads (0 = auto)");

  std::vector<const char*> argv;
  argv.reserve(argv_text.size());
  for (const auto& a : argv_text) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidInput;
  }

  try {
    Output result;
    if (eq->parsed()) {
      result = cmd_equilibrium(o, err);
    } else if (sim->parsed()) {
      result = cmd_simulate(o, err);
    } else if (cls->parsed()) {
      result = cmd_classify(o, err);
    } else if (swp->parsed()) {
      result = cmd_sweep(o, err);
    } else {
      result = cmd_stochastic(o, err);
    }
    for (const auto& [path, content] : result.files) {
      write_atomically(path, content);
    }
    if (o.out_path.empty()) {
      out << result.data;
      out.flush();
    } else {
      write_atomically(o.out_path, result.data);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kSuccess;
}

}  // namespace tse::cli

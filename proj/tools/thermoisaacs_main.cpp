#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "thermoisaacs/errors.hpp"
#include "thermoisaacs/game_sim.hpp"
#include "thermoisaacs/grid.hpp"
#include "thermoisaacs/hybrid_dynamics.hpp"
#include "thermoisaacs/isaacs_solver.hpp"
#include "thermoisaacs/problem.hpp"
#include "thermoisaacs/relay.hpp"
#include "thermoisaacs/solution_io.hpp"
#include "thermoisaacs/util.hpp"
#include "thermoisaacs/validation.hpp"

namespace ti = thermoisaacs;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitValidation = 3;

ti::ValueKind parse_kind(const std::string& s) {
  if (s == "lower") return ti::ValueKind::Lower;
  if (s == "upper") return ti::ValueKind::Upper;
  throw ti::InvalidArgument("unknown value kind: " + s);
}

ti::LoadedProblem load_with_h(const std::string& path, double h_override) {
  ti::LoadedProblem lp = ti::load_problem_file(path);
  if (h_override > 0) lp.grid.h = h_override;
  lp.problem.validate_basic();
  return lp;
}

ordered_json report_json(const ti::ValidationReport& r) {
  ordered_json j;
  j["bounds"] = {{"dyn_f", r.bounds.dyn_f},
                 {"dyn_g", r.bounds.dyn_g},
                 {"dyn_f1", r.bounds.dyn_f1},
                 {"dyn_g1", r.bounds.dyn_g1},
                 {"cost_max", r.bounds.cost},
                 {"cost_min", r.bounds.cost_min},
                 {"lipschitz", r.bounds.lipschitz}};
  j["controllability"] = {{"x_mode_minus", r.controllability.x_mode_minus},
                          {"x_mode_plus", r.controllability.x_mode_plus},
                          {"y_mode_minus", r.controllability.y_mode_minus},
                          {"y_mode_plus", r.controllability.y_mode_plus},
                          {"failures", r.controllability.failures}};
  j["invariance"] = {{"ok", r.invariance.ok},
                     {"violations", r.invariance.violations}};
  j["isaacs_gap"] = r.isaacs_gap;
  j["warnings"] = r.warnings;
  j["hard_ok"] = r.hard_ok();
  return j;
}

int cmd_validate(const std::string& path, int samples, int isaacs_samples) {
  ti::LoadedProblem lp = ti::load_problem_file(path);
  lp.problem.validate_basic();
  const ti::ValidationReport report =
      ti::validate_problem(lp.problem, samples, isaacs_samples);
  std::cout << report_json(report).dump(2) << "\n";
  return report.hard_ok() ? kExitOk : kExitValidation;
}

struct SolveFlags {
  std::string problem_path;
  std::string out_dir;
  std::string kind = "lower";
  std::string staging = "staged";
  std::string discount = "1-lambda*h";
  double tol = 1e-8;
  int max_iter = 100000;
  double h_override = -1;
  int threads = 0;
};

ti::SolverConfig make_config(const SolveFlags& flags, ti::ValueKind kind) {
  ti::SolverConfig cfg;
  cfg.value_kind = kind;
  if (flags.staging == "staged")
    cfg.staging = ti::Staging::Staged;
  else if (flags.staging == "plain")
    cfg.staging = ti::Staging::Plain;
  else
    throw ti::InvalidArgument("unknown staging mode: " + flags.staging);
  if (flags.discount == "1-lambda*h" || flags.discount == "1mlh")
    cfg.discount_form = ti::DiscountForm::OneMinusLambdaH;
  else if (flags.discount == "exp" || flags.discount == "exp(-lambda*h)")
    cfg.discount_form = ti::DiscountForm::ExpMinusLambdaH;
  else
    throw ti::InvalidArgument("unknown discount form: " + flags.discount);
  cfg.tol = flags.tol;
  cfg.max_iter = flags.max_iter;
  cfg.threads = flags.threads;
  return cfg;
}

int cmd_solve(const SolveFlags& flags) {
  const ti::LoadedProblem lp = load_with_h(flags.problem_path, flags.h_override);
  const ti::SectorGrid grid = ti::build_grid(lp.problem, lp.grid);
  if (grid.spacing_adjusted())
    std::cerr << "[solve] note: threshold nodes inserted, first-axis spacing "
                 "is locally nonuniform\n";

  std::vector<ti::ValueKind> kinds;
  if (flags.kind == "both")
    kinds = {ti::ValueKind::Lower, ti::ValueKind::Upper};
  else
    kinds = {parse_kind(flags.kind)};

  std::vector<std::string> files;
  std::string config_snapshot;
  for (const ti::ValueKind kind : kinds) {
    const ti::SolverConfig cfg = make_config(flags, kind);
    const ti::IsaacsSolver solver(lp.problem, grid, cfg);
    auto [field, stats] = solver.solve();
    const std::string kind_name =
        kind == ti::ValueKind::Lower ? "lower" : "upper";
    ti::write_solution(flags.out_dir, grid, field, stats, cfg, kind_name, files);
    std::cerr << "[solve] " << kind_name << ": " << stats.iterations
              << " iterations, residual " << ti::format_double(stats.final_residual)
              << ", projections " << stats.projection_count << "\n";
  }

  ordered_json cfgj;
  cfgj["kind"] = flags.kind;
  cfgj["staging"] = flags.staging;
  cfgj["discount_form"] = flags.discount;
  cfgj["tol"] = flags.tol;
  cfgj["max_iter"] = flags.max_iter;
  cfgj["h"] = grid.h();
  ti::write_manifest(flags.out_dir, ti::fnv1a64_hex(lp.source_text),
                     cfgj.dump(2), files);
  std::cerr << "[solve] wrote " << files.size() + 1 << " files to "
            << flags.out_dir << "\n";
  return kExitOk;
}

std::vector<int> read_control_file(const std::string& path) {
  const std::string text = ti::read_file(path);
  std::istringstream in(text);
  std::string line;
  std::vector<int> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = ti::split_csv_line(line);
    try {
      out.push_back(std::stoi(cells[0]));
    } catch (const std::exception&) {
      if (out.empty()) continue;  // tolerate one header line
      throw ti::ParseError(path + ": unparsable control index: " + cells[0]);
    }
  }
  if (out.empty()) throw ti::ParseError(path + ": no control indices");
  return out;
}

struct SimulateFlags {
  std::string problem_path;
  std::vector<double> x0, y0;
  int w0 = -1, z0 = -1;
  double T = 1.0, dt = 0.01;
  std::string alpha = "policy";
  std::string beta = "policy";
  std::string solution_dir;
  std::string kind = "lower";
  std::string out_dir;
  double h_override = -1;
};

int cmd_simulate(const SimulateFlags& flags) {
  const ti::LoadedProblem lp = load_with_h(flags.problem_path, flags.h_override);
  const ti::GameProblem& p = lp.problem;
  ti::HybridState s0{flags.x0, flags.y0, flags.w0, flags.z0};

  // Either side may follow the solved feedback or an explicit index file.
  const bool need_policy = flags.alpha == "policy" || flags.beta == "policy";
  std::unique_ptr<ti::SectorGrid> grid;
  std::unique_ptr<ti::ValueField> field;
  ti::FeedbackPolicy policy;
  if (need_policy) {
    if (flags.solution_dir.empty())
      throw ti::InvalidArgument("--alpha/--beta policy needs --solution <dir>");
    grid = std::make_unique<ti::SectorGrid>(ti::build_grid(p, lp.grid));
    field = std::make_unique<ti::ValueField>(
        ti::read_solution_field(flags.solution_dir, flags.kind, *grid));
    policy.problem = &p;
    policy.grid = grid.get();
    policy.field = field.get();
    policy.config.value_kind = parse_kind(flags.kind);
  }

  ti::ControlProvider alpha, beta;
  std::vector<int> alpha_seq, beta_seq;
  if (flags.alpha == "policy") {
    alpha = [&policy](int, const ti::HybridState& s) {
      return ti::feedback_controls(policy, s).a_index;
    };
  } else {
    alpha_seq = read_control_file(flags.alpha);
    alpha = [&alpha_seq](int k, const ti::HybridState&) {
      if (k >= int(alpha_seq.size()))
        throw ti::InvalidArgument("alpha control file too short");
      return alpha_seq[std::size_t(k)];
    };
  }
  if (flags.beta == "policy") {
    beta = [&policy](int, const ti::HybridState& s) {
      return ti::feedback_controls(policy, s).b_index;
    };
  } else {
    beta_seq = read_control_file(flags.beta);
    beta = [&beta_seq](int k, const ti::HybridState&) {
      if (k >= int(beta_seq.size()))
        throw ti::InvalidArgument("beta control file too short");
      return beta_seq[std::size_t(k)];
    };
  }

  const ti::Trajectory traj = ti::simulate_with(p, s0, alpha, beta, flags.T, flags.dt);

  std::ostringstream tcsv;
  tcsv << "t";
  for (int i = 0; i < p.n; ++i) tcsv << ",x" << (i + 1);
  for (int j = 0; j < p.m; ++j) tcsv << ",y" << (j + 1);
  tcsv << ",w,z\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const ti::HybridState& s = traj.states[k];
    tcsv << ti::format_double(double(k) * traj.dt);
    for (double v : s.x) tcsv << "," << ti::format_double(v);
    for (double v : s.y) tcsv << "," << ti::format_double(v);
    tcsv << "," << s.w << "," << s.z << "\n";
  }

  std::ostringstream ecsv;
  ecsv << "time,kind,new_w,new_z\n";
  for (const ti::SwitchingEvent& ev : traj.events) {
    const char* kind = ev.kind == ti::SwitchingEvent::Kind::XOnly ? "x"
                       : ev.kind == ti::SwitchingEvent::Kind::YOnly ? "y"
                                                                    : "xy";
    ecsv << ti::format_double(ev.time) << "," << kind << "," << ev.new_w << ","
         << ev.new_z << "\n";
  }

  if (flags.out_dir.empty()) {
    std::cout << tcsv.str();
    std::cerr << "[simulate] " << traj.events.size() << " switching events\n";
  } else {
    std::filesystem::create_directories(flags.out_dir);
    std::vector<std::string> files;
    ti::write_file((std::filesystem::path(flags.out_dir) / "trajectory.csv").string(),
                   tcsv.str());
    files.push_back("trajectory.csv");
    ti::write_file((std::filesystem::path(flags.out_dir) / "events.csv").string(),
                   ecsv.str());
    files.push_back("events.csv");
    ordered_json cfgj;
    cfgj["T"] = flags.T;
    cfgj["dt"] = flags.dt;
    cfgj["alpha"] = flags.alpha;
    cfgj["beta"] = flags.beta;
    ti::write_manifest(flags.out_dir, ti::fnv1a64_hex(lp.source_text),
                       cfgj.dump(2), files);
    std::cerr << "[simulate] wrote trajectory.csv, events.csv ("
              << traj.events.size() << " events) to " << flags.out_dir << "\n";
  }
  return kExitOk;
}

struct VerifyFlags {
  std::string problem_path;
  std::string solution_dir;
  std::string kind = "lower";
  double gap_tol = -1;
  int trials = 200;
  double T = -1;
  double dt = -1;
  double h_override = -1;
};

int cmd_verify(const VerifyFlags& flags) {
  const ti::LoadedProblem lp = load_with_h(flags.problem_path, flags.h_override);
  const ti::GameProblem& p = lp.problem;
  const ti::SectorGrid grid = ti::build_grid(p, lp.grid);
  const ti::ValueField field =
      ti::read_solution_field(flags.solution_dir, flags.kind, grid);
  ti::FeedbackPolicy policy;
  policy.problem = &p;
  policy.grid = &grid;
  policy.field = &field;
  policy.config.value_kind = parse_kind(flags.kind);

  const double gap_tol = flags.gap_tol > 0 ? flags.gap_tol : ti::default_gap_tol(p);
  const double T = flags.T > 0 ? flags.T : 40.0 / p.lambda;
  const ti::SampledBounds bounds = ti::sample_bounds(p);
  const double band = std::min(p.rho.hi - p.rho.lo, p.eta.hi - p.eta.lo);
  double dt = flags.dt;
  if (dt <= 0) {
    dt = grid.h();
    if (bounds.dyn_M() > 0) dt = std::min(dt, 0.45 * band / bounds.dyn_M());
    dt /= 5.0;
  }

  // 3x3 start grid over the first-axis quantiles of the full cube; remaining
  // axes sit at the cube midpoints. Each start takes the mode admissible for
  // its coordinate, preferring the sector whose band the point actually
  // occupies over the degenerate choice of always starting at (-1,-1).
  auto quantiles = [](double lo, double hi) {
    return std::array<double, 3>{lo + 0.25 * (hi - lo), lo + 0.5 * (hi - lo),
                                 lo + 0.75 * (hi - lo)};
  };
  const auto xs = quantiles(p.qx[0][0], p.qx[0][1]);
  const auto ys = quantiles(p.qy[0][0], p.qy[0][1]);
  std::vector<double> x_rest(static_cast<std::size_t>(p.n)), y_rest(static_cast<std::size_t>(p.m));
  for (int i = 1; i < p.n; ++i)
    x_rest[std::size_t(i)] = 0.5 * (p.qx[std::size_t(i)][0] + p.qx[std::size_t(i)][1]);
  for (int j = 1; j < p.m; ++j)
    y_rest[std::size_t(j)] = 0.5 * (p.qy[std::size_t(j)][0] + p.qy[std::size_t(j)][1]);

  ordered_json starts = ordered_json::array();
  double max_gap = 0;
  for (const double sx : xs) {
    for (const double sy : ys) {
      ti::HybridState s;
      s.x = x_rest;
      s.y = y_rest;
      s.x[0] = sx;
      s.y[0] = sy;
      s.w = sx >= p.rho.lo ? 1 : -1;
      s.z = sy >= p.eta.lo ? 1 : -1;
      const double val = ti::interpolated_value(policy, s);
      const double clv = ti::closed_loop_value(policy, s, T, dt);
      const double gap = std::fabs(clv - val);
      max_gap = std::max(max_gap, gap);
      starts.push_back({{"x1", sx},
                        {"y1", sy},
                        {"w", s.w},
                        {"z", s.z},
                        {"value", val},
                        {"closed_loop", clv},
                        {"gap", gap}});
    }
  }

  ti::HybridState center;
  center.x = x_rest;
  center.y = y_rest;
  center.x[0] = xs[1];
  center.y[0] = ys[1];
  center.w = xs[1] >= p.rho.lo ? 1 : -1;
  center.z = ys[1] >= p.eta.lo ? 1 : -1;
  ti::AdversarialOptions opt;
  opt.trials = flags.trials;
  opt.T = T;
  opt.dt = dt;
  const ti::AdversarialResult adv = ti::adversarial_check(policy, center, opt);

  const bool ok = max_gap <= gap_tol && adv.max_gap() <= gap_tol;
  ordered_json j;
  j["kind"] = flags.kind;
  j["gap_tol"] = gap_tol;
  j["T"] = T;
  j["dt"] = dt;
  j["starts"] = starts;
  j["max_start_gap"] = max_gap;
  j["adversarial"] = {{"trials", opt.trials},
                      {"gap_adverse_b", adv.gap_adverse_b},
                      {"gap_adverse_a", adv.gap_adverse_a}};
  j["ok"] = ok;
  std::cout << j.dump(2) << "\n";
  return ok ? kExitOk : kExitValidation;
}

struct RelayFlags {
  std::string input = "-";
  double lo = -0.5, hi = 0.5;
  int w0 = -1;
  double cross_tol = 0;
};

int cmd_relay(const RelayFlags& flags) {
  std::string text;
  if (flags.input == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    text = ti::read_file(flags.input);
  }
  ti::SampledSignal signal;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = ti::split_csv_line(line);
    if (cells.size() < 2)
      throw ti::ParseError("line " + std::to_string(lineno) +
                           ": expected t,value");
    try {
      const double t = std::stod(cells[0]);
      const double v = std::stod(cells[1]);
      signal.times.push_back(t);
      signal.values.push_back(v);
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // tolerate one header line
      throw ti::ParseError("line " + std::to_string(lineno) +
                           ": unparsable sample");
    }
  }
  const ti::RelayTrace trace =
      ti::relay_evaluate(signal, {flags.lo, flags.hi}, flags.w0, flags.cross_tol);
  std::cout << "switch_time,new_output\n";
  int out = trace.initial_output;
  for (const double st : trace.switch_times) {
    out = -out;
    std::cout << ti::format_double(st) << "," << out << "\n";
  }
  const double t_end = signal.times.empty() ? 0.0 : signal.times.back();
  std::cout << "# initial_output=" << trace.initial_output
            << " final_output=" << ti::relay_output_at(trace, t_end + 1.0)
            << " switches=" << trace.switch_times.size()
            << " variation=" << ti::relay_variation(trace, t_end) << "\n";
  return kExitOk;
}

struct ExportFlags {
  std::string problem_path;
  std::string solution_dir;
  std::string kind = "lower";
  std::string out;  // empty: stdout
  double h_override = -1;
};

// True iff every non-first axis index of the node sits on its middle slice.
bool first_axis_slice(const std::vector<std::vector<double>>& axes, int local,
                      int rest) {
  int rem = local % rest;
  for (int k = int(axes.size()) - 1; k >= 1; --k) {
    const int sz = int(axes[std::size_t(k)].size());
    if (rem % sz != sz / 2) return false;
    rem /= sz;
  }
  return true;
}

int cmd_export(const ExportFlags& flags) {
  const ti::LoadedProblem lp = load_with_h(flags.problem_path, flags.h_override);
  const ti::SectorGrid grid = ti::build_grid(lp.problem, lp.grid);
  const ti::ValueField field =
      ti::read_solution_field(flags.solution_dir, flags.kind, grid);

  // Long-format table over the first axes; other axes hold their middle node.
  std::ostringstream out;
  out << "x1,y1,w,z,V\n";
  for (int w : {-1, 1}) {
    for (int z : {-1, 1}) {
      const int nyl = grid.y_local_count(z);
      std::vector<double> xc(grid.axes_x().size()), yc(grid.axes_y().size());
      for (int xl = 0; xl < grid.x_local_count(w); ++xl) {
        grid.x_node_coords(w, xl, xc);
        if (!first_axis_slice(grid.axes_x(), xl, grid.x_rest())) continue;
        for (int yl = 0; yl < nyl; ++yl) {
          grid.y_node_coords(z, yl, yc);
          if (!first_axis_slice(grid.axes_y(), yl, grid.y_rest())) continue;
          out << ti::format_double(xc[0]) << "," << ti::format_double(yc[0])
              << "," << w << "," << z << ","
              << ti::format_double(field.at(w, z, xl, yl)) << "\n";
        }
      }
    }
  }
  if (flags.out.empty())
    std::cout << out.str();
  else
    ti::write_file(flags.out, out.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Staged semi-Lagrangian solver for zero-sum differential games "
               "with delayed thermostatic switching"};
  // --h is the time-step override on several subcommands, so help must not
  // claim the short -h.
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);

  std::string v_path;
  int v_samples = ti::kDefaultSamplesPerFace;
  int v_isaacs = ti::kDefaultIsaacsSamples;
  CLI::App* validate = app.add_subcommand(
      "validate", "Check controllability, invariance and the Isaacs gap");
  validate->add_option("problem", v_path, "problem JSON file")->required();
  validate->add_option("--samples", v_samples, "samples per boundary face");
  validate->add_option("--isaacs-samples", v_isaacs, "Isaacs-gap sample count");

  SolveFlags sf;
  CLI::App* solve = app.add_subcommand("solve", "Solve for value functions");
  solve->add_option("problem", sf.problem_path, "problem JSON file")->required();
  solve->add_option("--out", sf.out_dir, "output directory")->required();
  solve->add_option("--kind", sf.kind, "lower | upper | both");
  solve->add_option("--staging", sf.staging, "staged | plain");
  solve->add_option("--discount", sf.discount, "1-lambda*h | exp");
  solve->add_option("--tol", sf.tol, "fixed-point residual tolerance");
  solve->add_option("--max-iter", sf.max_iter, "iteration cap");
  solve->add_option("--h", sf.h_override, "override the scheme step h");
  solve->add_option("--threads", sf.threads, "sweep threads (0: auto)");

  SimulateFlags mf;
  CLI::App* simulate = app.add_subcommand("simulate", "Roll out one trajectory");
  simulate->add_option("problem", mf.problem_path, "problem JSON file")->required();
  simulate->add_option("--x0", mf.x0, "initial x (comma separated)")
      ->required()
      ->delimiter(',');
  simulate->add_option("--y0", mf.y0, "initial y (comma separated)")
      ->required()
      ->delimiter(',');
  simulate->add_option("--w0", mf.w0, "initial mode w (-1 or 1)");
  simulate->add_option("--z0", mf.z0, "initial mode z (-1 or 1)");
  simulate->add_option("--T", mf.T, "horizon")->required();
  simulate->add_option("--dt", mf.dt, "Euler step")->required();
  simulate->add_option("--alpha", mf.alpha, "'policy' or control-index file");
  simulate->add_option("--beta", mf.beta, "'policy' or control-index file");
  simulate->add_option("--solution", mf.solution_dir, "solved output directory");
  simulate->add_option("--kind", mf.kind, "field the policy reads");
  simulate->add_option("--out", mf.out_dir, "output directory (default stdout)");
  simulate->add_option("--h", mf.h_override, "h override used when solving");

  VerifyFlags vf;
  CLI::App* verify = app.add_subcommand(
      "verify", "Compare rollouts against the solved field");
  verify->add_option("problem", vf.problem_path, "problem JSON file")->required();
  verify->add_option("--solution", vf.solution_dir, "solved output directory")
      ->required();
  verify->add_option("--kind", vf.kind, "field to verify");
  verify->add_option("--gap-tol", vf.gap_tol, "gap tolerance (default 0.05*max ell/lambda)");
  verify->add_option("--trials", vf.trials, "adversarial trials");
  verify->add_option("--T", vf.T, "rollout horizon (default 40/lambda)");
  verify->add_option("--dt", vf.dt, "rollout step (default from grid)");
  verify->add_option("--h", vf.h_override, "h override used when solving");

  RelayFlags rf;
  CLI::App* relay = app.add_subcommand(
      "relay", "Evaluate the delayed relay on a sampled signal");
  relay->add_option("input", rf.input, "CSV of t,value samples ('-' = stdin)");
  relay->add_option("--lo", rf.lo, "lower threshold");
  relay->add_option("--hi", rf.hi, "upper threshold");
  relay->add_option("--w0", rf.w0, "initial output (-1 or 1)");
  relay->add_option("--cross-tol", rf.cross_tol, "crossing tolerance");

  ExportFlags ef;
  CLI::App* exp = app.add_subcommand(
      "export", "Flatten sector CSVs into one plot-ready table");
  exp->add_option("problem", ef.problem_path, "problem JSON file")->required();
  exp->add_option("--solution", ef.solution_dir, "solved output directory")
      ->required();
  exp->add_option("--kind", ef.kind, "field to export");
  exp->add_option("--out", ef.out, "output file (default stdout)");
  exp->add_option("--h", ef.h_override, "h override used when solving");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(v_path, v_samples, v_isaacs);
    if (solve->parsed()) return cmd_solve(sf);
    if (simulate->parsed()) return cmd_simulate(mf);
    if (verify->parsed()) return cmd_verify(vf);
    if (relay->parsed()) return cmd_relay(rf);
    if (exp->parsed()) return cmd_export(ef);
  } catch (const ti::MaxIterExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const ti::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

// h2pipe: simulate, classify and sweep a hydrogen-blended gas pipe.

#include "h2pipe/chaos_metrics.hpp"
#include "h2pipe/errors.hpp"
#include "h2pipe/report.hpp"
#include "h2pipe/run_config.hpp"
#include "h2pipe/sweep.hpp"
#include "h2pipe/trajectory_io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace h2pipe;

namespace {

enum Exit : int { ok = 0, usage = 1, sim_failure = 2, partial_sweep = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PointOverrides {
  std::string config;
  std::optional<double> omega, kappa, mu;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config, "key = value config file (defaults when omitted)");
    app->add_option("--omega", omega, "forcing frequency [cyc/hr]");
    app->add_option("--kappa", kappa, "relative forcing amplitude");
    app->add_option("--mu", mu, "feedback gain [m^2 s/kg]");
  }

  RunConfig load() const {
    RunConfig cfg = config.empty() ? RunConfig{} : load_run_config(config);
    if (omega) cfg.point.omega_cyc_per_hr = *omega;
    if (kappa) cfg.point.kappa = *kappa;
    if (mu) cfg.point.mu = *mu;
    cfg.validate();
    return cfg;
  }
};

double parse_number(std::string_view s, const std::string& what) {
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw UsageError(fmt::format("bad number '{}' in {}", s, what));
  return v;
}

// "a:b:n" -> n points on [a, b]
std::vector<double> parse_grid(const std::string& spec, const std::string& flag) {
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) throw UsageError(flag + " expects a:b:n");
  const double a = parse_number(std::string_view(spec).substr(0, c1), flag);
  const double b = parse_number(std::string_view(spec).substr(c1 + 1, c2 - c1 - 1), flag);
  const double n = parse_number(std::string_view(spec).substr(c2 + 1), flag);
  if (n < 1 || n != static_cast<int>(n)) throw UsageError(flag + ": n must be a positive integer");
  return linspace(a, b, static_cast<int>(n));
}

std::vector<double> parse_list(const std::string& spec, const std::string& flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto comma = std::min(spec.find(',', pos), spec.size());
    out.push_back(parse_number(std::string_view(spec).substr(pos, comma - pos), flag));
    pos = comma + 1;
  }
  return out;
}

int default_jobs() {
  if (const char* env = std::getenv("H2PIPE_JOBS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

void print_result(const ChaosResult& r) {
  fmt::print("C_rho1  = {:.6f}\nC_rho2  = {:.6f}\nC_p     = {:.6f}\nC       = {:.6f}\nchaotic = {}\n", r.C_rho1,
             r.C_rho2, r.C_p, r.C, r.chaotic);
}

int cmd_simulate(const PointOverrides& po, const std::string& out_path) {
  const RunConfig cfg = po.load();
  const auto& s = cfg.setup;
  const double q = s.pipe.withdrawal_flux;
  Trajectory<double> traj;
  try {
    traj = simulate(cfg.point, s, q);
  } catch (const IntegrationFailure& e) {
    std::error_code ec;
    fs::remove(out_path, ec);
    fmt::print(stderr, "simulation failed: {} at t = {} s\n", e.what(), e.time_s());
    return sim_failure;
  } catch (const std::runtime_error& e) {
    std::error_code ec;
    fs::remove(out_path, ec);
    fmt::print(stderr, "simulation failed: {}\n", e.what());
    return sim_failure;
  }
  write_file_atomic(out_path, trajectory_csv(TrajectoryTable::from(traj)));
  fmt::print("wrote {} samples to {} ({} steps, {} rejected)\n", traj.size(), out_path, traj.stats.steps,
             traj.stats.rejected);
  return ok;
}

int cmd_chaos(const PointOverrides& po) {
  const RunConfig cfg = po.load();
  const PairOutcome out = pair_simulate(cfg.point, cfg.setup);
  SweepRecord rec;
  rec.omega_cyc_per_hr = cfg.point.omega_cyc_per_hr;
  rec.kappa = cfg.point.kappa;
  rec.mu = cfg.point.mu;
  rec.fingerprint = fingerprint_of(cfg.setup);
  if (!out.ok) {
    rec.status = RecordStatus::failed;
    rec.failure = out.failure;
    fmt::print(stderr, "run {} failed: {}\n", out.failed_member, out.failure);
    fmt::print("{}\n", to_json_line(rec));
    return sim_failure;
  }
  rec.status = RecordStatus::done;
  rec.result = out.result;
  print_result(out.result);
  fmt::print("{}\n", to_json_line(rec));
  return ok;
}

struct SweepArgs {
  std::string grid_omega = "0:2:21";
  std::string grid_kappa = "0.5:1:15";
  std::string gains = "0,0.0025,0.006";
  std::optional<int> jobs;
  std::string store = "sweep.jsonl";
  bool resume = false;
};

int cmd_sweep(const PointOverrides& po, const SweepArgs& a) {
  const RunConfig cfg = po.load();
  SweepRequest req;
  req.omega_grid = parse_grid(a.grid_omega, "--grid-omega");
  req.kappa_grid = parse_grid(a.grid_kappa, "--grid-kappa");
  req.gains = parse_list(a.gains, "--gains");
  req.setup = cfg.setup;
  req.parallelism = a.jobs.value_or(default_jobs());
  SweepPlan plan;
  try {
    plan = plan_sweep(req);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!a.resume && fs::exists(a.store) && fs::file_size(a.store) > 0) {
    throw UsageError(fmt::format("store '{}' already exists; pass --resume to continue it", a.store));
  }
  fmt::print("{} jobs, {} workers, fingerprint {}\n", plan.jobs.size(), plan.parallelism, plan.fingerprint);
  const SweepSummary s = run_sweep(plan, a.store);

  // Failed records from earlier runs count too.
  std::size_t failed_total = 0;
  for (const auto& r : load_store(a.store)) {
    if (r.status == RecordStatus::failed && r.fingerprint == plan.fingerprint) ++failed_total;
  }
  fmt::print("planned {}  already complete {}  simulated {}  done {}  failed {}  skipped {}  wall {:.1f} s\n",
             s.planned, s.already_complete, s.simulated, s.done, s.failed, s.skipped, s.wall_time_s);
  return failed_total > 0 ? partial_sweep : ok;
}

int cmd_interface(const std::string& store, double threshold, const std::string& prefix) {
  if (!fs::exists(store)) throw UsageError(fmt::format("store '{}' not found", store));
  const auto records = load_store(store);
  const auto interfaces = interfaces_by_gain(records, threshold);
  for (const auto& gi : interfaces) {
    const std::string path = fmt::format("{}_mu{}.csv", prefix, gi.mu);
    write_file_atomic(path, interface_csv(gi));
    fmt::print("wrote {}\n", path);
  }
  const std::string svg_path = prefix + ".svg";
  write_file_atomic(svg_path, interface_svg(interfaces));
  fmt::print("wrote {}\n", svg_path);
  return ok;
}

int cmd_phase(const std::string& traj_path, double t0, double t1, const std::string& out) {
  TrajectoryTable table;
  try {
    table = read_trajectory_csv(traj_path);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  std::string svg;
  try {
    svg = phase_portrait_svg(table, t0, t1);
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }
  write_file_atomic(out, svg);
  fmt::print("wrote {}\n", out);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hydrogen-blended pipe flow: simulation, chaos measure and feedback sweeps"};
  app.require_subcommand(1);

  PointOverrides sim_po, chaos_po, sweep_po;
  std::string sim_out = "trajectory.csv";
  auto* sim = app.add_subcommand("simulate", "single run from the steady state, written as CSV");
  sim_po.attach(sim);
  sim->add_option("-o,--out", sim_out, "output CSV path");

  auto* chaos = app.add_subcommand("chaos", "pair experiment and chaos measure at one operating point");
  chaos_po.attach(chaos);

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "resumable (omega, kappa, mu) grid of pair experiments");
  sweep_po.attach(sweep);
  sweep->add_option("--grid-omega", sa.grid_omega, "a:b:n [cyc/hr]");
  sweep->add_option("--grid-kappa", sa.grid_kappa, "a:b:n");
  sweep->add_option("--gains", sa.gains, "comma-separated gains");
  sweep->add_option("-j,--jobs", sa.jobs, "worker count (default $H2PIPE_JOBS or 1)");
  sweep->add_option("--store", sa.store, "line-delimited record store");
  sweep->add_flag("--resume", sa.resume, "continue an existing store");

  std::string if_store = "sweep.jsonl";
  double if_threshold = 0.5;
  std::string if_prefix = "interface";
  auto* iface = app.add_subcommand("interface", "chaotic interface per gain as CSV plus one SVG");
  iface->add_option("--store", if_store, "sweep store")->required();
  iface->add_option("--threshold", if_threshold, "chaos threshold on C");
  iface->add_option("--out", if_prefix, "output prefix");

  std::string pp_traj, pp_out = "phase.svg";
  double pp_t0 = 75, pp_t1 = 100;
  auto* phase = app.add_subcommand("phase-portrait", "outlet phase portrait from a trajectory CSV");
  phase->add_option("--traj", pp_traj, "trajectory CSV")->required();
  phase->add_option("--t-start", pp_t0, "window start [hr]");
  phase->add_option("--t-end", pp_t1, "window end [hr]");
  phase->add_option("-o,--out", pp_out, "output SVG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }

  try {
    if (*sim) return cmd_simulate(sim_po, sim_out);
    if (*chaos) return cmd_chaos(chaos_po);
    if (*sweep) return cmd_sweep(sweep_po, sa);
    if (*iface) return cmd_interface(if_store, if_threshold, if_prefix);
    if (*phase) return cmd_phase(pp_traj, pp_t0, pp_t1, pp_out);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return usage;
  } catch (const UsageError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return usage;
  } catch (const StoreCorruption& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return usage;
  } catch (const StoreConflict& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return usage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return sim_failure;
  }
  return usage;
}

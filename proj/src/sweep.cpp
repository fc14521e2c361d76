#include "h2pipe/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>
#include <utility>

namespace h2pipe {

using json = nlohmann::json;

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("linspace: need at least one point");
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  v.back() = b;
  return v;
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void require_increasing(const std::vector<double>& v, const char* name) {
  if (v.empty()) throw std::invalid_argument(std::string("plan_sweep: empty ") + name);
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) {
      throw std::invalid_argument(std::string("plan_sweep: ") + name + " must be strictly increasing");
    }
  }
}

using Key = std::tuple<double, double, double>;

Key key_of(const SweepRecord& r) { return {r.omega_cyc_per_hr, r.kappa, r.mu}; }

json optional_number(const std::optional<ChaosResult>& r, double ChaosResult::*field) {
  return r ? json(r.value().*field) : json(nullptr);
}

}  // namespace

std::string fingerprint_of(const ExperimentSetup& s) {
  const json j = {
      {"pipe",
       {{"length_m", s.pipe.length_m},
        {"diameter_m", s.pipe.diameter_m},
        {"friction", s.pipe.friction},
        {"sigma1_mps", s.pipe.sigma1_mps},
        {"sigma2_mps", s.pipe.sigma2_mps},
        {"source_pressure_pa", s.pipe.source_pressure_pa},
        {"withdrawal_flux", s.pipe.withdrawal_flux}}},
      {"forcing", {{"gamma_bar", s.forcing.gamma_bar}}},
      {"control", {{"mu_bar", s.control.mu_bar}}},
      {"chaos",
       {{"delta_q", s.chaos.delta_q},
        {"i0_begin", s.chaos.i0_begin},
        {"i0_end", s.chaos.i0_end},
        {"it_begin", s.chaos.it_begin},
        {"it_end", s.chaos.it_end},
        {"threshold_C", s.chaos.threshold_C},
        {"log_floor", s.chaos.log_floor}}},
      {"integrator",
       {{"rel_tol", s.integrator.rel_tol},
        {"abs_tol", s.integrator.abs_tol},
        {"max_step_s", s.integrator.max_step_s},
        {"newton_tol", s.integrator.newton_tol},
        {"max_newton_iters", s.integrator.max_newton_iters},
        {"min_step_s", s.integrator.min_step_s}}},
      {"order", s.order},
      {"horizon_hr", s.horizon_hr},
      {"n_intervals", s.n_intervals}};
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << fnv1a(j.dump());
  return out.str();
}

SweepPlan plan_sweep(const SweepRequest& request) {
  require_increasing(request.omega_grid, "omega grid");
  require_increasing(request.kappa_grid, "kappa grid");
  require_increasing(request.gains, "gain list");
  if (request.parallelism < 1) throw std::invalid_argument("plan_sweep: parallelism must be >= 1");
  request.setup.validate();

  SweepPlan plan;
  plan.omega_grid = request.omega_grid;
  plan.kappa_grid = request.kappa_grid;
  plan.gains = request.gains;
  plan.setup = request.setup;
  plan.parallelism = request.parallelism;
  plan.fingerprint = fingerprint_of(request.setup);
  plan.jobs.reserve(plan.omega_grid.size() * plan.kappa_grid.size() * plan.gains.size());
  for (const double omega : plan.omega_grid) {
    for (const double kappa : plan.kappa_grid) {
      for (const double mu : plan.gains) plan.jobs.push_back({omega, kappa, mu});
    }
  }
  return plan;
}

std::string to_json_line(const SweepRecord& r) {
  json j = {{"omega_cyc_per_hr", r.omega_cyc_per_hr},
            {"kappa", r.kappa},
            {"mu", r.mu},
            {"status", std::string(to_string(r.status))},
            {"C_rho1", optional_number(r.result, &ChaosResult::C_rho1)},
            {"C_rho2", optional_number(r.result, &ChaosResult::C_rho2)},
            {"C_p", optional_number(r.result, &ChaosResult::C_p)},
            {"C", optional_number(r.result, &ChaosResult::C)},
            {"chaotic", r.status == RecordStatus::failed ? json(nullptr)
                                                         : json(r.result ? r.result->chaotic : false)},
            {"wall_time_s", r.wall_time_s},
            {"fingerprint", r.fingerprint}};
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j.dump();
}

SweepRecord parse_record_line(std::string_view line, std::size_t line_no) {
  auto fail = [&](const std::string& why) -> StoreCorruption {
    return StoreCorruption("sweep store line " + std::to_string(line_no) + ": " + why, line_no);
  };
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw fail(std::string("unparseable record (") + e.what() + ")");
  }
  try {
    SweepRecord r;
    r.omega_cyc_per_hr = j.at("omega_cyc_per_hr").get<double>();
    r.kappa = j.at("kappa").get<double>();
    r.mu = j.at("mu").get<double>();
    const auto status = parse_record_status(j.at("status").get<std::string>());
    if (!status) throw fail("unknown status");
    r.status = *status;
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.fingerprint = j.at("fingerprint").get<std::string>();
    if (j.contains("failure")) r.failure = j.at("failure").get<std::string>();
    if (r.status == RecordStatus::done) {
      ChaosResult c;
      c.C_rho1 = j.at("C_rho1").get<double>();
      c.C_rho2 = j.at("C_rho2").get<double>();
      c.C_p = j.at("C_p").get<double>();
      c.C = j.at("C").get<double>();
      c.chaotic = j.at("chaotic").get<bool>();
      r.result = c;
    }
    return r;
  } catch (const json::exception& e) {
    throw fail(std::string("malformed record (") + e.what() + ")");
  }
}

namespace {

struct LoadedStore {
  std::vector<SweepRecord> records;
  std::uintmax_t valid_bytes = 0;  // prefix ending at the last complete record
  bool needs_newline = false;      // file ends in a complete record without '\n'
};

LoadedStore load_store_detailed(const std::filesystem::path& path) {
  LoadedStore out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::map<Key, std::size_t> seen;
  while (pos < content.size()) {
    ++line_no;
    const std::size_t nl = content.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string_view line(content.data() + pos, (complete ? nl : content.size()) - pos);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      pos = complete ? nl + 1 : content.size();
      if (complete) out.valid_bytes = pos;
      continue;
    }
    SweepRecord rec;
    try {
      rec = parse_record_line(line, line_no);
    } catch (const StoreCorruption&) {
      if (!complete) break;  // torn tail from an interrupted write
      throw;
    }
    if (const auto [it, inserted] = seen.emplace(key_of(rec), line_no); !inserted) {
      throw StoreCorruption("sweep store line " + std::to_string(line_no) + ": duplicate key (first at line " +
                                std::to_string(it->second) + ")",
                            line_no);
    }
    out.records.push_back(std::move(rec));
    if (complete) {
      pos = nl + 1;
      out.valid_bytes = pos;
    } else {
      pos = content.size();
      out.valid_bytes = pos;
      out.needs_newline = true;
    }
  }
  return out;
}

}  // namespace

std::vector<SweepRecord> load_store(const std::filesystem::path& path) {
  return load_store_detailed(path).records;
}

SweepRecord run_job(const OperatingPoint& job, const SweepPlan& plan) {
  SweepRecord rec;
  rec.omega_cyc_per_hr = job.omega_cyc_per_hr;
  rec.kappa = job.kappa;
  rec.mu = job.mu;
  rec.fingerprint = plan.fingerprint;
  const auto start = std::chrono::steady_clock::now();
  if (job.omega_cyc_per_hr == 0.0) {
    // Constant forcing: nothing to simulate.
    rec.status = RecordStatus::skipped;
  } else {
    const PairOutcome outcome = pair_simulate(job, plan.setup);
    if (outcome.ok) {
      rec.status = RecordStatus::done;
      rec.result = outcome.result;
    } else {
      rec.status = RecordStatus::failed;
      rec.failure = "run " + std::to_string(outcome.failed_member) + ": " + outcome.failure;
    }
  }
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

SweepSummary run_sweep(const SweepPlan& plan, const std::filesystem::path& store_path,
                       const SweepOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SweepSummary summary;
  summary.planned = plan.jobs.size();

  LoadedStore existing = load_store_detailed(store_path);
  std::map<Key, const SweepRecord*> by_key;
  for (const auto& r : existing.records) by_key[key_of(r)] = &r;

  std::vector<OperatingPoint> pending;
  for (const auto& job : plan.jobs) {
    const auto it = by_key.find({job.omega_cyc_per_hr, job.kappa, job.mu});
    if (it == by_key.end()) {
      pending.push_back(job);
      continue;
    }
    if (it->second->fingerprint != plan.fingerprint) {
      throw StoreConflict("sweep store " + store_path.string() + " holds (omega=" +
                          std::to_string(job.omega_cyc_per_hr) + ", kappa=" + std::to_string(job.kappa) +
                          ", mu=" + std::to_string(job.mu) +
                          ") from a different configuration; use a new store path");
    }
    ++summary.already_complete;
  }
  if (options.max_new_jobs && pending.size() > *options.max_new_jobs) pending.resize(*options.max_new_jobs);

  if (pending.empty()) {
    summary.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
  }

  // Drop a torn tail so the next record starts on a fresh line.
  if (std::filesystem::exists(store_path) &&
      std::filesystem::file_size(store_path) != existing.valid_bytes) {
    std::filesystem::resize_file(store_path, existing.valid_bytes);
  }
  std::ofstream out(store_path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open sweep store " + store_path.string() + " for writing");
  if (existing.needs_newline) out << '\n';

  std::mutex mu;
  std::condition_variable cv;
  std::deque<SweepRecord> finished;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> live_workers{0};

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(plan.parallelism), pending.size());
  live_workers = workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t idx = next.fetch_add(1);
        if (idx >= pending.size()) break;
        SweepRecord rec = run_job(pending[idx], plan);
        {
          const std::lock_guard lock(mu);
          finished.push_back(std::move(rec));
        }
        cv.notify_one();
      }
      {
        const std::lock_guard lock(mu);
        --live_workers;
      }
      cv.notify_one();
    });
  }

  // Single writer.
  std::size_t written = 0;
  while (written < pending.size()) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return !finished.empty() || live_workers == 0; });
    if (finished.empty()) break;
    SweepRecord rec = std::move(finished.front());
    finished.pop_front();
    lock.unlock();

    out << to_json_line(rec) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("write to sweep store " + store_path.string() + " failed");
    ++written;
    if (rec.status != RecordStatus::skipped) ++summary.simulated;
    switch (rec.status) {
      case RecordStatus::done:
        ++summary.done;
        break;
      case RecordStatus::failed:
        ++summary.failed;
        break;
      case RecordStatus::skipped:
        ++summary.skipped;
        break;
    }
    if (options.on_record) options.on_record(rec);
  }
  pool.clear();

  summary.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

}  // namespace h2pipe

// Resumable parallel sweeps of chaos experiments over (omega, kappa, mu).

#ifndef H2PIPE_SWEEP_HPP
#define H2PIPE_SWEEP_HPP

#include "h2pipe/chaos_metrics.hpp"
#include "h2pipe/sweep_record.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace h2pipe {

/// n uniform points on [a, b]; n == 1 gives {a}.
[[nodiscard]] std::vector<double> linspace(double a, double b, int n);

struct SweepRequest {
  std::vector<double> omega_grid = linspace(0.0, 2.0, 21);
  std::vector<double> kappa_grid = linspace(0.5, 1.0, 15);
  std::vector<double> gains{0.0, 0.0025, 0.006};
  ExperimentSetup setup;
  int parallelism = 1;
};

struct SweepPlan {
  std::vector<double> omega_grid;
  std::vector<double> kappa_grid;
  std::vector<double> gains;
  ExperimentSetup setup;
  int parallelism = 1;
  std::vector<OperatingPoint> jobs;  // omega-major, then kappa, then mu
  std::string fingerprint;
};

/// Hash of every physical, forcing, control, chaos and integrator parameter
/// plus the discretization; per-job coordinates are not included.
[[nodiscard]] std::string fingerprint_of(const ExperimentSetup& setup);

[[nodiscard]] SweepPlan plan_sweep(const SweepRequest& request);

class StoreCorruption : public std::runtime_error {
 public:
  StoreCorruption(const std::string& what, std::size_t line) : std::runtime_error(what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class StoreConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[nodiscard]] std::string to_json_line(const SweepRecord& record);
[[nodiscard]] SweepRecord parse_record_line(std::string_view line, std::size_t line_no);

/// Loads every complete record. A trailing line without a newline that does
/// not parse is treated as a torn write and ignored.
[[nodiscard]] std::vector<SweepRecord> load_store(const std::filesystem::path& path);

struct SweepSummary {
  std::size_t planned = 0;
  std::size_t already_complete = 0;
  std::size_t simulated = 0;  // pair simulations actually run
  std::size_t done = 0;       // counts among newly written records
  std::size_t failed = 0;
  std::size_t skipped = 0;
  double wall_time_s = 0;
};

struct SweepOptions {
  /// Stop dispatching after this many new jobs (used to emulate interruption).
  std::optional<std::size_t> max_new_jobs;
  std::function<void(const SweepRecord&)> on_record;
};

/// Runs every planned job that the store does not already hold, appending one
/// record per job through a single writer.
SweepSummary run_sweep(const SweepPlan& plan, const std::filesystem::path& store_path,
                       const SweepOptions& options = {});

/// Executes one job without touching any store.
[[nodiscard]] SweepRecord run_job(const OperatingPoint& job, const SweepPlan& plan);

}  // namespace h2pipe

#endif  // H2PIPE_SWEEP_HPP

#ifndef H2PIPE_SWEEP_RECORD_HPP
#define H2PIPE_SWEEP_RECORD_HPP

#include <optional>
#include <string>
#include <string_view>

namespace h2pipe {

struct ChaosResult {
  double C_rho1 = 0;
  double C_rho2 = 0;
  double C_p = 0;
  double C = 0;
  bool chaotic = false;

  friend bool operator==(const ChaosResult&, const ChaosResult&) = default;
};

enum class RecordStatus { done, failed, skipped };

[[nodiscard]] std::string_view to_string(RecordStatus s);
[[nodiscard]] std::optional<RecordStatus> parse_record_status(std::string_view s);

/// Outcome of one (omega, kappa, mu) chaos experiment.
struct SweepRecord {
  double omega_cyc_per_hr = 0;
  double kappa = 0;
  double mu = 0;
  RecordStatus status = RecordStatus::done;
  std::optional<ChaosResult> result;  // set when done
  double wall_time_s = 0;
  std::string fingerprint;
  std::string failure;  // diagnostic when failed

  /// Same key and same outcome; wall time is ignored.
  [[nodiscard]] bool same_content(const SweepRecord& o) const {
    return omega_cyc_per_hr == o.omega_cyc_per_hr && kappa == o.kappa && mu == o.mu &&
           status == o.status && result == o.result && fingerprint == o.fingerprint;
  }
};

}  // namespace h2pipe

#endif  // H2PIPE_SWEEP_RECORD_HPP

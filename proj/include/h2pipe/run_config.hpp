// Flat key = value run configuration in user units (km, MPa, cyc/hr, hr).

#ifndef H2PIPE_RUN_CONFIG_HPP
#define H2PIPE_RUN_CONFIG_HPP

#include "h2pipe/chaos_metrics.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace h2pipe {

/// Raised for unreadable files, unknown keys and bad values; key() names the
/// offending key when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string key = {})
      : std::runtime_error(what), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  ExperimentSetup setup;  // internal SI values
  OperatingPoint point{0.5, 0.85, 0.0};

  /// Recognised keys in file order, e.g. "length_km".
  [[nodiscard]] static const std::vector<std::string>& keys();

  void set(std::string_view key, double value);
  [[nodiscard]] double get(std::string_view key) const;

  /// Experiment setup with the point's forcing and gain filled in.
  [[nodiscard]] ExperimentSetup resolved_setup() const;

  void validate() const;
  [[nodiscard]] std::string to_text() const;
};

/// Parses "key = value" lines; '#' starts a comment. Keys not mentioned keep
/// their defaults.
[[nodiscard]] RunConfig parse_run_config(std::string_view text);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace h2pipe

#endif  // H2PIPE_RUN_CONFIG_HPP

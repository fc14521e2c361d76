#include "h2pipe/run_config.hpp"

#include "h2pipe/units.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

namespace h2pipe {

namespace {

struct Field {
  std::string key;
  std::function<double(const RunConfig&)> get;
  std::function<void(RunConfig&, double)> set;
};

// Scaled field: stored = user * scale.
Field scaled(std::string key, std::function<double&(RunConfig&)> ref, double scale = 1.0) {
  return {key,
          [ref, scale](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)) / scale; },
          [ref, scale](RunConfig& c, double v) { ref(c) = v * scale; }};
}

Field integer(std::string key, std::function<int&(RunConfig&)> ref) {
  return {key, [ref](const RunConfig& c) { return static_cast<double>(ref(const_cast<RunConfig&>(c))); },
          [ref, key](RunConfig& c, double v) {
            if (v != static_cast<double>(static_cast<int>(v))) {
              throw ConfigError(fmt::format("config key '{}' needs an integer, got {}", key, v), key);
            }
            ref(c) = static_cast<int>(v);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f;
    f.push_back(scaled("length_km", [](RunConfig& c) -> double& { return c.setup.pipe.length_m; },
                       units::meters_per_km));
    f.push_back(scaled("diameter_m", [](RunConfig& c) -> double& { return c.setup.pipe.diameter_m; }));
    f.push_back(scaled("friction", [](RunConfig& c) -> double& { return c.setup.pipe.friction; }));
    f.push_back(scaled("sigma1_mps", [](RunConfig& c) -> double& { return c.setup.pipe.sigma1_mps; }));
    f.push_back(scaled("sigma2_mps", [](RunConfig& c) -> double& { return c.setup.pipe.sigma2_mps; }));
    f.push_back(scaled("source_pressure_mpa",
                       [](RunConfig& c) -> double& { return c.setup.pipe.source_pressure_pa; },
                       units::pascals_per_mpa));
    f.push_back(scaled("withdrawal_flux", [](RunConfig& c) -> double& { return c.setup.pipe.withdrawal_flux; }));
    f.push_back(scaled("gamma_bar", [](RunConfig& c) -> double& { return c.setup.forcing.gamma_bar; }));
    f.push_back(scaled("omega_cyc_per_hr", [](RunConfig& c) -> double& { return c.point.omega_cyc_per_hr; }));
    f.push_back(scaled("kappa", [](RunConfig& c) -> double& { return c.point.kappa; }));
    f.push_back(scaled("mu_bar", [](RunConfig& c) -> double& { return c.setup.control.mu_bar; }));
    f.push_back(scaled("mu", [](RunConfig& c) -> double& { return c.point.mu; }));
    f.push_back(integer("order", [](RunConfig& c) -> int& { return c.setup.order; }));
    f.push_back(scaled("horizon_hr", [](RunConfig& c) -> double& { return c.setup.horizon_hr; }));
    f.push_back(integer("n_intervals", [](RunConfig& c) -> int& { return c.setup.n_intervals; }));
    f.push_back(scaled("delta_q", [](RunConfig& c) -> double& { return c.setup.chaos.delta_q; }));
    f.push_back(scaled("early_window_begin", [](RunConfig& c) -> double& { return c.setup.chaos.i0_begin; }));
    f.push_back(scaled("early_window_end", [](RunConfig& c) -> double& { return c.setup.chaos.i0_end; }));
    f.push_back(scaled("late_window_begin", [](RunConfig& c) -> double& { return c.setup.chaos.it_begin; }));
    f.push_back(scaled("late_window_end", [](RunConfig& c) -> double& { return c.setup.chaos.it_end; }));
    f.push_back(scaled("chaos_threshold", [](RunConfig& c) -> double& { return c.setup.chaos.threshold_C; }));
    f.push_back(scaled("rel_tol", [](RunConfig& c) -> double& { return c.setup.integrator.rel_tol; }));
    f.push_back(scaled("abs_tol", [](RunConfig& c) -> double& { return c.setup.integrator.abs_tol; }));
    f.push_back(scaled("max_step_s", [](RunConfig& c) -> double& { return c.setup.integrator.max_step_s; }));
    f.push_back(scaled("newton_tol", [](RunConfig& c) -> double& { return c.setup.integrator.newton_tol; }));
    f.push_back(integer("max_newton_iters", [](RunConfig& c) -> int& { return c.setup.integrator.max_newton_iters; }));
    f.push_back(scaled("min_step_s", [](RunConfig& c) -> double& { return c.setup.integrator.min_step_s; }));
    return f;
  }();
  return all;
}

const Field& field(std::string_view key) {
  const auto& all = fields();
  const auto it = std::find_if(all.begin(), all.end(), [&](const Field& f) { return f.key == key; });
  if (it == all.end()) throw ConfigError(fmt::format("unknown config key '{}'", key), std::string(key));
  return *it;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return k;
}

void RunConfig::set(std::string_view key, double value) { field(key).set(*this, value); }

double RunConfig::get(std::string_view key) const { return field(key).get(*this); }

ExperimentSetup RunConfig::resolved_setup() const {
  ExperimentSetup s = setup;
  s.forcing.omega_cyc_per_hr = point.omega_cyc_per_hr;
  s.forcing.kappa = point.kappa;
  s.control.mu = point.mu;
  return s;
}

void RunConfig::validate() const {
  try {
    resolved_setup().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& f : fields()) out += fmt::format("{} = {}\n", f.key, f.get(*this));
  return out;
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view raw = trim(line.substr(eq + 1));
    double value = 0;
    const auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc() || end != raw.data() + raw.size() || raw.empty()) {
      throw ConfigError(fmt::format("config line {}: key '{}' has non-numeric value '{}'", line_no, key, raw),
                        key);
    }
    field(key);  // unknown-key check before the setter runs
    cfg.set(key, value);
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace h2pipe

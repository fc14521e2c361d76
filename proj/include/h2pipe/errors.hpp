#ifndef H2PIPE_ERRORS_HPP
#define H2PIPE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace h2pipe {

// Forcing produced a hydrogen fraction outside (0, 1).
class InvalidForcing : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Non-finite intermediate (pressure gradient, rhs, Jacobian entry).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The boundary feedback loop has no root on the admissible bracket.
class ControllerInfeasible : public std::runtime_error {
 public:
  ControllerInfeasible(const std::string& what, double t_s, double mu)
      : std::runtime_error(what), t_s_(t_s), mu_(mu) {}
  [[nodiscard]] double time_s() const noexcept { return t_s_; }
  [[nodiscard]] double gain() const noexcept { return mu_; }

 private:
  double t_s_;
  double mu_;
};

class SteadySolveFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Squared pressure would go non-positive along the pipe: flux too high for the length.
class ChokedFlow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(const std::string& what, double t_s)
      : std::runtime_error(what), t_s_(t_s) {}
  [[nodiscard]] double time_s() const noexcept { return t_s_; }

 private:
  double t_s_;
};

}  // namespace h2pipe

#endif  // H2PIPE_ERRORS_HPP

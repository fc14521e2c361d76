#include "h2pipe/report.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace h2pipe;

namespace {

std::vector<SweepRecord> store_with(double (*c_of)(double, double), std::vector<double> gains) {
  std::vector<SweepRecord> recs;
  for (const double mu : gains) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        SweepRecord r;
        r.omega_cyc_per_hr = 0.5 * i;
        r.kappa = 0.25 + 0.125 * j;
        r.mu = mu;
        if (r.omega_cyc_per_hr == 0) {
          r.status = RecordStatus::skipped;
        } else {
          r.status = RecordStatus::done;
          const double c = c_of(r.omega_cyc_per_hr, r.kappa);
          r.result = combine_channels(c, c, c, 0.5);
        }
        recs.push_back(r);
      }
    }
  }
  return recs;
}

int count(const std::string& s, const std::string& what) {
  int n = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("C equal to kappa gives a flat interface") {
  const auto recs = store_with([](double, double k) { return k; }, {0.0, 0.006});
  const auto ifs = interfaces_by_gain(recs, 0.5);
  REQUIRE(ifs.size() == 2);
  CHECK(ifs[0].mu == 0.0);
  CHECK(ifs[1].mu == 0.006);
  const auto csv = interface_csv(ifs[0]);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "omega_cyc_per_hr,kappa_star,status");
  std::getline(in, line);
  CHECK(line == "0,nan,no_chaos_in_range");
  for (int i = 1; i < 5; ++i) {
    std::getline(in, line);
    CHECK(line.find(",0.5,found") != std::string::npos);  // largest grid kappa <= 0.5
  }
  const auto svg = interface_svg(ifs);
  CHECK(count(svg, "class=\"legend\"") == 2);
  CHECK(count(svg, "<polyline") >= 2);
  CHECK(svg.find("mu = 0.006") != std::string::npos);
}

TEST_CASE("no chaos anywhere") {
  const auto recs = store_with([](double, double) { return -1.0; }, {0.0});
  const auto ifs = interfaces_by_gain(recs, 0.5);
  const auto csv = interface_csv(ifs[0]);
  CHECK(count(csv, "nan,no_chaos_in_range") == 5);
  const auto svg = interface_svg(ifs);
  CHECK(count(svg, "<polyline") == 0);
  CHECK(count(svg, "class=\"legend\"") == 1);
}

TEST_CASE("phase portrait window") {
  TrajectoryTable t;
  const int n = 400;
  t.t_hr = Eigen::VectorXd::LinSpaced(n + 1, 0, 100);
  t.rho1_out = (t.t_hr.array() * 0.5).sin().matrix();
  t.rho2_out = (t.t_hr.array() * 0.5).cos().matrix();
  t.p_out_mpa = t.rho1_out;
  t.phi_in = Eigen::VectorXd::Constant(n + 1, 75);
  t.u = Eigen::VectorXd::Constant(n + 1, 1.75);
  const auto svg = phase_portrait_svg(t, 75, 100);
  CHECK(count(svg, "<polyline") == 2);
  CHECK_THROWS_AS((void)phase_portrait_svg(t, 75, 120), std::out_of_range);
  CHECK_THROWS_AS((void)phase_portrait_svg(t, 80, 75), std::out_of_range);

  t.rho1_out.setConstant(48);
  t.rho2_out.setConstant(0.75);
  t.p_out_mpa.setConstant(6.94);
  const auto steady = phase_portrait_svg(t, 75, 100);
  CHECK(count(steady, "<polyline") == 0);
  CHECK(count(steady, "class=\"point\"") == 2);
}

// Sweep execution with real pair simulations on a shortened horizon.

#include "h2pipe/sweep.hpp"

#include <doctest.h>

#include <filesystem>
#include <map>
#include <tuple>

using namespace h2pipe;
namespace fs = std::filesystem;

namespace {

ExperimentSetup short_setup() {
  ExperimentSetup s;
  s.horizon_hr = 5;
  s.n_intervals = 500;
  return s;
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("h2pipe_it_" + name + ".jsonl");
  fs::remove(p);
  return p;
}

std::map<std::tuple<double, double, double>, SweepRecord> by_key(const std::vector<SweepRecord>& recs) {
  std::map<std::tuple<double, double, double>, SweepRecord> m;
  for (const auto& r : recs) m[{r.omega_cyc_per_hr, r.kappa, r.mu}] = r;
  return m;
}

}  // namespace

TEST_CASE("interrupted 70-job sweep resumes with exactly the remaining jobs") {
  SweepRequest req;
  req.omega_grid = linspace(0, 2, 7);
  req.kappa_grid = linspace(0.5, 1, 5);
  req.gains = {0.0, 0.006};
  req.setup = short_setup();
  req.parallelism = 2;
  const auto plan = plan_sweep(req);
  REQUIRE(plan.jobs.size() == 70);

  const auto store = fresh("resume");
  SweepOptions stop;
  stop.max_new_jobs = 10;
  const auto first = run_sweep(plan, store, stop);
  CHECK(first.done + first.failed + first.skipped == 10);
  CHECK(load_store(store).size() == 10);

  std::size_t seen = 0;
  SweepOptions count;
  count.on_record = [&](const SweepRecord&) { ++seen; };
  const auto second = run_sweep(plan, store, count);
  CHECK(second.already_complete == 10);
  CHECK(second.done + second.failed + second.skipped == 60);
  CHECK(seen == 60);
  CHECK(load_store(store).size() == 70);

  const auto third = run_sweep(plan, store);
  CHECK(third.already_complete == 70);
  CHECK(third.simulated == 0);
  fs::remove(store);
}

TEST_CASE("record set does not depend on the worker count") {
  SweepRequest req;
  req.omega_grid = {0.5, 1.0, 1.5};
  req.kappa_grid = {0.5, 0.75, 1.0};
  req.gains = {0.0025};
  req.setup = short_setup();

  std::vector<std::map<std::tuple<double, double, double>, SweepRecord>> runs;
  for (const int workers : {1, 4}) {
    req.parallelism = workers;
    const auto store = fresh("par" + std::to_string(workers));
    const auto s = run_sweep(plan_sweep(req), store);
    CHECK(s.simulated == 9);
    runs.push_back(by_key(load_store(store)));
    fs::remove(store);
  }
  REQUIRE(runs[0].size() == 9);
  REQUIRE(runs[1].size() == 9);
  for (const auto& [key, rec] : runs[0]) {
    REQUIRE(runs[1].count(key) == 1);
    CHECK(rec.same_content(runs[1].at(key)));
  }
}

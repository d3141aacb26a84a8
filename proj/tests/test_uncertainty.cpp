#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tc/dynamics.hpp"
#include "tc/ground_state.hpp"
#include "tc/model.hpp"
#include "tc/uncertainty.hpp"

using tc::dynamics::SweepSchedule;
using tc::measurement::monte_carlo_scan_uncertainty;
using tc::measurement::monte_carlo_uncertainty;
using tc::measurement::OffsetDistribution;
using tc::model::SystemParams;

namespace {

SystemParams small_params(std::size_t n) {
  SystemParams p;
  p.n_qubits = n;
  p.fock_cutoff = 3;
  p.lambda_mhz = 30.0;
  p.delta_r_mhz = -30.0;
  p.omega_drive_mhz = 4.0;
  return p;
}

SweepSchedule short_schedule() {
  SweepSchedule s;
  s.ratio_start = 0.5;
  s.ratio_end = 2.5;
  s.tau_ns = 30.0;
  s.dt_ns = 0.3;
  return s;
}

SystemParams scan_params(std::size_t n) {
  SystemParams p;
  p.n_qubits = n;
  p.fock_cutoff = 12;
  p.lambda_mhz = 30.0;
  p.delta_r_mhz = 30.0;
  p.omega_drive_mhz = 4.0;
  return p;
}

}  // namespace

TEST_CASE("sweep disorder: zero sigma reproduces the clean trajectory") {
  const SystemParams p = small_params(2);
  const SweepSchedule s = short_schedule();
  const auto mc = monte_carlo_uncertainty(p, s, 0.0, 3, 42);
  const auto clean = tc::dynamics::evolve_sweep(p, s);

  REQUIRE(mc.grid.size() == clean.times_ns.size());
  REQUIRE(mc.mean.size() == mc.grid.size());
  for (std::size_t i = 0; i < mc.grid.size(); ++i) {
    CHECK(mc.grid[i] == clean.times_ns[i]);
    CHECK(mc.mean[i] == clean.jz_scaled[i]);
    CHECK(mc.sd[i] == 0.0);
  }
  REQUIRE(mc.offsets_mhz.size() == 3);
  for (const auto& row : mc.offsets_mhz)
    for (const double o : row) CHECK(o == 0.0);
}

TEST_CASE("sweep disorder: determinism, offset bounds, spread") {
  const SystemParams p = small_params(2);
  const SweepSchedule s = short_schedule();
  const auto a = monte_carlo_uncertainty(p, s, 1.0, 4, 7);
  const auto b = monte_carlo_uncertainty(p, s, 1.0, 4, 7);
  for (std::size_t i = 0; i < a.mean.size(); ++i) {
    CHECK(a.mean[i] == b.mean[i]);
    CHECK(a.sd[i] == b.sd[i]);
  }
  REQUIRE(a.offsets_mhz.size() == 4);
  bool any_nonzero = false;
  for (const auto& row : a.offsets_mhz) {
    REQUIRE(row.size() == p.n_qubits);
    for (const double o : row) {
      CHECK(std::abs(o) <= 1.0);
      any_nonzero = any_nonzero || o != 0.0;
    }
  }
  CHECK(any_nonzero);
  CHECK(*std::max_element(a.sd.begin(), a.sd.end()) > 0.0);

  const auto c = monte_carlo_uncertainty(p, s, 1.0, 4, 8);
  CHECK(c.offsets_mhz[0] != a.offsets_mhz[0]);

  const auto g = monte_carlo_uncertainty(p, s, 1.0, 4, 7,
                                         OffsetDistribution::gaussian);
  CHECK(g.offsets_mhz[0] != a.offsets_mhz[0]);
}

TEST_CASE("sweep disorder: precondition errors") {
  const SystemParams p = small_params(2);
  const SweepSchedule s = short_schedule();
  CHECK_THROWS_AS(monte_carlo_uncertainty(p, s, 1.0, 1, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(monte_carlo_uncertainty(p, s, -0.5, 4, 5),
                  std::invalid_argument);
}

TEST_CASE("scan disorder: mean and SD match a by-hand recomputation") {
  const SystemParams p = scan_params(2);
  const std::vector<double> ratios{0.7, 1.1, 1.6};
  const auto mc = monte_carlo_scan_uncertainty(p, ratios, 1.0, 3, 11);

  REQUIRE(mc.offsets_mhz.size() == 3);
  std::vector<std::vector<double>> jz;
  for (const auto& offs : mc.offsets_mhz) {
    const auto scan =
        tc::ground_state::ground_state_scan_with_offsets(p, ratios, offs);
    std::vector<double> row;
    for (const auto& pt : scan) row.push_back(pt.jz_scaled);
    jz.push_back(row);
  }
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double mean = (jz[0][i] + jz[1][i] + jz[2][i]) / 3.0;
    double var = 0.0;
    for (std::size_t r = 0; r < 3; ++r)
      var += (jz[r][i] - mean) * (jz[r][i] - mean);
    CHECK(mc.grid[i] == ratios[i]);
    CHECK(mc.mean[i] == doctest::Approx(mean).epsilon(1e-13));
    CHECK(mc.sd[i] == doctest::Approx(std::sqrt(var / 2.0)).epsilon(1e-10));
  }
}

TEST_CASE("scan disorder: zero sigma matches the clean symmetric scan") {
  const SystemParams p = scan_params(2);
  const std::vector<double> ratios{0.8, 1.4};
  const auto mc = monte_carlo_scan_uncertainty(p, ratios, 0.0, 2, 3);
  const auto clean = tc::ground_state::ground_state_scan(p, ratios);
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    CHECK(mc.sd[i] == 0.0);
    CHECK(std::abs(mc.mean[i] - clean[i].jz_scaled) < 2e-6);
  }
}

TEST_CASE("scan disorder: more qubits suppress the jz spread") {
  // Fixed-seed preview of the N-scaling (the full 50-run version with N up
  // to 8 lives in the acceptance suite).
  const std::vector<double> ratios{0.8, 1.0, 1.2, 1.5, 2.0};
  const auto n2 = monte_carlo_scan_uncertainty(scan_params(2), ratios, 1.0, 16, 21);
  const auto n4 = monte_carlo_scan_uncertainty(scan_params(4), ratios, 1.0, 16, 21);
  const double max2 = *std::max_element(n2.sd.begin(), n2.sd.end());
  const double max4 = *std::max_element(n4.sd.begin(), n4.sd.end());
  CHECK(max4 <= max2);
  CHECK(max2 > 0.0);
}

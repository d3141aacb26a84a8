#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tc/config.hpp"
#include "tc/csvio.hpp"
#include "tc/experiment.hpp"

using tc::config::ExperimentConfig;
using tc::config::parse_config;
using tc::csvio::parse_csv;
using tc::csvio::Table;
using tc::experiment::emit_plot_script;
using tc::experiment::ResultBundle;
using tc::experiment::run_experiment;
using tc::experiment::write_bundle;

namespace {

// Small composite + short ramp so dispatch tests stay fast.
const char* kTinySweep =
    "experiment = sweep\n"
    "[system]\n"
    "n_qubits = 2\n"
    "fock_cutoff = 3\n"
    "[schedule]\n"
    "tau_ns = 10\n"
    "dt_ns = 0.1\n";

std::vector<std::string> column_names(const Table& t) {
  std::vector<std::string> names;
  for (const auto& c : t.columns) names.push_back(c.name);
  return names;
}

std::string metadata_value(const ResultBundle& b, const std::string& key) {
  for (const auto& [k, v] : b.metadata)
    if (k == key) return v;
  return {};
}

}  // namespace

TEST_CASE("sweep bundles carry the contracted columns and start all-ground") {
  const ResultBundle bundle = run_experiment(parse_config(kTinySweep));
  CHECK(metadata_value(bundle, "experiment") == "sweep");
  CHECK(metadata_value(bundle, "tool_version") == tc::experiment::kToolVersion);
  CHECK_FALSE(metadata_value(bundle, "wall_time_s").empty());
  CHECK(metadata_value(bundle, "system.n_qubits") == "2");

  REQUIRE(bundle.tables.size() == 1);
  const Table& t = bundle.tables[0];
  CHECK(t.name == "sweep");
  CHECK(column_names(t) ==
        std::vector<std::string>{"time_ns", "ratio", "jz_scaled", "photons",
                                 "p00", "p01", "p10", "p11", "trace_drift"});
  REQUIRE_FALSE(t.rows.empty());
  // The ramp starts from the all-ground state.
  CHECK(t.rows.front()[2] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(t.rows.front()[2] + 1.0) < 0.02);
  CHECK(t.rows.front()[4] == doctest::Approx(1.0).epsilon(1e-12));  // p00
}

TEST_CASE("identical configs produce byte-identical tables") {
  const ResultBundle a = run_experiment(parse_config(kTinySweep));
  const ResultBundle b = run_experiment(parse_config(kTinySweep));
  CHECK(tc::csvio::format_csv(a.tables[0]) == tc::csvio::format_csv(b.tables[0]));
}

TEST_CASE("ground-scan stacks one block per qubit count") {
  const char* text =
      "experiment = ground-scan\n"
      "[system]\n"
      "fock_cutoff = 6\n"
      "[scan]\n"
      "ratio_min = 0.5\n"
      "ratio_max = 2.5\n"
      "ratio_step = 0.5\n"
      "qubit_counts = 2, 3\n";
  ExperimentConfig cfg = parse_config(text);
  const ResultBundle bundle = run_experiment(cfg);
  const Table& t = bundle.tables[0];
  CHECK(t.name == "ground-scan");
  REQUIRE(t.rows.size() == 10);  // 5 ratios x 2 counts
  CHECK(t.rows[0][0] == 2.0);
  CHECK(t.rows[5][0] == 3.0);
  CHECK(t.rows[0][1] == 0.5);
  CHECK(t.rows[0][2] == doctest::Approx(-1.0).epsilon(0.01));

  // Worker count must not change the numbers (scan points are independent).
  cfg.threads = 2;
  const ResultBundle parallel = run_experiment(cfg);
  CHECK(tc::csvio::format_csv(parallel.tables[0]) ==
        tc::csvio::format_csv(bundle.tables[0]));
}

TEST_CASE("mean-field, spectrum, uncertainty, calibrate, parity dispatch") {
  const ResultBundle mf = run_experiment(parse_config(
      "experiment = mean-field\n[scan]\nratio_step = 0.5\n"));
  CHECK(mf.tables[0].name == "mean-field");
  CHECK(mf.tables[0].rows.size() == 5);
  // Deep in the normal phase; the finite-N drive tilt is tiny.
  CHECK(mf.tables[0].rows[0][1] == doctest::Approx(-1.0).epsilon(0.01));

  const ResultBundle spec = run_experiment(parse_config(
      "experiment = spectrum\n"
      "[system]\nn_qubits = 2\nfock_cutoff = 3\n"
      "[schedule]\ntau_ns = 10\ndt_ns = 0.1\n"
      "[scan]\ntrack_lowest = 2\n"));
  CHECK(column_names(spec.tables[0]) ==
        std::vector<std::string>{"time_ns", "ratio", "energy_0", "energy_1",
                                 "pop_0", "pop_1"});
  CHECK_FALSE(metadata_value(spec, "eigen_track_ambiguous").empty());

  const std::string unc_text =
      "experiment = uncertainty\nseed = 11\n"
      "[system]\nn_qubits = 2\nfock_cutoff = 3\n"
      "[schedule]\ntau_ns = 10\ndt_ns = 0.1\n"
      "[scan]\nn_runs = 3\n";
  const ResultBundle unc = run_experiment(parse_config(unc_text));
  CHECK(column_names(unc.tables[0]) ==
        std::vector<std::string>{"time_ns", "ratio", "jz_mean", "jz_sd"});
  const ResultBundle unc2 = run_experiment(parse_config(unc_text));
  CHECK(tc::csvio::format_csv(unc2.tables[0]) ==
        tc::csvio::format_csv(unc.tables[0]));

  const ResultBundle scan_unc = run_experiment(parse_config(
      "experiment = uncertainty\nseed = 11\n"
      "[system]\nn_qubits = 2\nfock_cutoff = 4\n"
      "[scan]\ntarget = ground-scan\nratio_min = 1.0\nratio_max = 1.5\n"
      "ratio_step = 0.5\nn_runs = 2\n"));
  CHECK(column_names(scan_unc.tables[0]) ==
        std::vector<std::string>{"ratio", "jz_mean", "jz_sd"});
  CHECK(scan_unc.tables[0].rows.size() == 2);

  const ResultBundle cal = run_experiment(parse_config(
      "experiment = calibrate\n"
      "[system]\nkappa1_mhz = 0\n"
      "[scan]\nomega_list_mhz = 4\ndrive_time_ns = 25\n"));
  REQUIRE(cal.tables[0].rows.size() == 1);
  const auto& row = cal.tables[0].rows[0];
  CHECK(row[0] == 4.0);
  CHECK(row[2] == doctest::Approx(row[1]).epsilon(1e-3));  // direct vs expected
  CHECK(std::abs(row[5]) < 0.01);                          // recovery error

  const ResultBundle par = run_experiment(parse_config(
      "experiment = parity-check\n[system]\nn_qubits = 2\nfock_cutoff = 4\n"));
  REQUIRE(par.tables[0].rows.size() == 2);
  CHECK(par.tables[0].rows[0][1] <= 1e-10);  // undriven conserves parity
  CHECK(par.tables[0].rows[1][1] > 1e-3);    // resonator drive breaks it

  const ResultBundle par0 = run_experiment(parse_config(
      "experiment = parity-check\n"
      "[system]\nn_qubits = 2\nfock_cutoff = 4\nomega_drive_mhz = 0\n"));
  CHECK(par0.tables[0].rows[1][1] <= 1e-10);  // no drive: parity intact
}

TEST_CASE("module errors come back labeled with the experiment") {
  ExperimentConfig cfg = parse_config("experiment = uncertainty\n");
  try {
    run_experiment(cfg);
    FAIL("expected a seed error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("uncertainty:") == 0);
    CHECK(std::string(e.what()).find("seed") != std::string::npos);
  }
}

TEST_CASE("plot scripts target the right table shape") {
  const ResultBundle sweep = run_experiment(parse_config(kTinySweep));
  const std::string script = emit_plot_script(sweep);
  CHECK(script.find("load(\"sweep.csv\")") != std::string::npos);
  CHECK(script.find("axvline(1.0") != std::string::npos);
  CHECK(script.find("jz_scaled") != std::string::npos);
  CHECK(script.find("\"/") == std::string::npos);  // relative paths only

  const ResultBundle gs = run_experiment(parse_config(
      "experiment = ground-scan\n"
      "[system]\nfock_cutoff = 6\n"
      "[scan]\nratio_step = 1.0\nqubit_counts = 2, 3\n"));
  const std::string gs_script = emit_plot_script(gs);
  CHECK(gs_script.find("n_qubits") != std::string::npos);
  CHECK(gs_script.find("defaultdict") != std::string::npos);
  CHECK(gs_script.find("N = {n}") != std::string::npos);

  const ResultBundle unc = run_experiment(parse_config(
      "experiment = uncertainty\nseed = 11\n"
      "[system]\nn_qubits = 2\nfock_cutoff = 3\n"
      "[schedule]\ntau_ns = 10\ndt_ns = 0.1\n"
      "[scan]\nn_runs = 3\n"));
  CHECK(emit_plot_script(unc).find("fill_between") != std::string::npos);

  CHECK_THROWS_AS(emit_plot_script(ResultBundle{}), std::invalid_argument);
  const ResultBundle par = run_experiment(parse_config(
      "experiment = parity-check\n[system]\nn_qubits = 2\nfock_cutoff = 4\n"));
  CHECK_THROWS_AS(emit_plot_script(par), std::invalid_argument);
}

TEST_CASE("write_bundle lays files down and the CSV self-roundtrips") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tc_experiment_write_test";
  fs::remove_all(dir);

  const ResultBundle bundle = run_experiment(parse_config(kTinySweep));
  const std::vector<std::string> written = write_bundle(bundle, dir.string());
  REQUIRE(written.size() == 2);
  CHECK(fs::exists(dir / "sweep.csv"));
  CHECK(fs::exists(dir / "sweep.meta"));

  std::ifstream csv(dir / "sweep.csv", std::ios::binary);
  std::stringstream buf;
  buf << csv.rdbuf();
  const Table back = parse_csv(buf.str(), "sweep");
  REQUIRE(back.rows.size() == bundle.tables[0].rows.size());
  for (std::size_t r = 0; r < back.rows.size(); ++r)
    for (std::size_t c = 0; c < back.rows[r].size(); ++c)
      CHECK(back.rows[r][c] == bundle.tables[0].rows[r][c]);

  std::ifstream meta(dir / "sweep.meta");
  std::stringstream mbuf;
  mbuf << meta.rdbuf();
  CHECK(mbuf.str().find("experiment = sweep\n") != std::string::npos);
  CHECK(mbuf.str().find("table.sweep.rows = ") != std::string::npos);

  CHECK_THROWS_AS(write_bundle(ResultBundle{}, dir.string()),
                  std::invalid_argument);
  fs::remove_all(dir);
}

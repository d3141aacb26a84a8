#include "tc/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <stdexcept>
#include <type_traits>

#include "tc/calibration.hpp"
#include "tc/dynamics.hpp"
#include "tc/ground_state.hpp"
#include "tc/model.hpp"
#include "tc/uncertainty.hpp"
#include "tc/units.hpp"

namespace tc::experiment {
namespace {

using config::Experiment;
using config::ExperimentConfig;
using csvio::Table;

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string fmt_list(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>)
      out += fmt(values[i]);
    else
      out += std::to_string(values[i]);
  }
  return out;
}

// Column label p<bits> for joint-probability entry q, first qubit first.
std::string bit_label(std::size_t q, std::size_t n_qubits) {
  std::string s = "p";
  for (std::size_t k = 0; k < n_qubits; ++k)
    s += static_cast<char>('0' + ((q >> (n_qubits - 1 - k)) & 1));
  return s;
}

Table ground_scan_table(const ExperimentConfig& cfg) {
  std::vector<std::size_t> counts = cfg.qubit_counts;
  if (counts.empty()) counts.push_back(cfg.system.n_qubits);
  const std::vector<double> ratios = cfg.scan_ratios();

  auto scan_one = [&](std::size_t n) {
    model::SystemParams p = cfg.system;
    p.n_qubits = n;
    return ground_state::ground_state_scan(p, ratios);
  };

  std::vector<std::vector<ground_state::ScanPoint>> scans(counts.size());
  if (cfg.threads > 1 && counts.size() > 1) {
    // Scans over different qubit counts are independent; run them in waves
    // of at most `threads` workers, keeping the output order fixed.
    for (std::size_t base = 0; base < counts.size(); base += cfg.threads) {
      std::vector<std::future<std::vector<ground_state::ScanPoint>>> wave;
      const std::size_t end = std::min(base + cfg.threads, counts.size());
      for (std::size_t i = base; i < end; ++i)
        wave.push_back(std::async(std::launch::async, scan_one, counts[i]));
      for (std::size_t i = base; i < end; ++i)
        scans[i] = wave[i - base].get();
    }
  } else {
    for (std::size_t i = 0; i < counts.size(); ++i) scans[i] = scan_one(counts[i]);
  }

  Table t;
  t.name = "ground-scan";
  t.columns = {{"n_qubits", "count"},
               {"ratio", "dimensionless"},
               {"jz_scaled", "dimensionless"},
               {"jx_scaled", "dimensionless"},
               {"photons_scaled", "count per qubit"},
               {"ground_energy", "rad/ns"},
               {"degenerate", "flag"}};
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (const auto& pt : scans[i])
      t.rows.push_back({static_cast<double>(counts[i]), pt.ratio, pt.jz_scaled,
                        pt.jx_scaled, pt.photons_scaled, pt.ground_energy,
                        pt.degenerate ? 1.0 : 0.0});
  return t;
}

Table mean_field_table(const ExperimentConfig& cfg) {
  Table t;
  t.name = "mean-field";
  t.columns = {{"ratio", "dimensionless"},
               {"jz_scaled", "dimensionless"},
               {"jx_scaled", "dimensionless"},
               {"photons_scaled", "count per qubit"},
               {"ground_energy", "rad/ns per qubit"}};
  for (double r : cfg.scan_ratios()) {
    const ground_state::ScanPoint pt = ground_state::mean_field_ground_state(
        r, cfg.system.omega_drive_mhz, cfg.system);
    t.rows.push_back(
        {pt.ratio, pt.jz_scaled, pt.jx_scaled, pt.photons_scaled, pt.ground_energy});
  }
  return t;
}

Table sweep_table(const ExperimentConfig& cfg) {
  const dynamics::TrajectoryRecord traj =
      dynamics::evolve_sweep(cfg.system, cfg.schedule);
  const std::size_t nstates = std::size_t{1} << cfg.system.n_qubits;

  Table t;
  t.name = "sweep";
  t.columns = {{"time_ns", "ns"},
               {"ratio", "dimensionless"},
               {"jz_scaled", "dimensionless"},
               {"photons", "count"}};
  for (std::size_t q = 0; q < nstates; ++q)
    t.columns.push_back({bit_label(q, cfg.system.n_qubits), "probability"});
  t.columns.push_back({"trace_drift", "dimensionless"});

  for (std::size_t i = 0; i < traj.times_ns.size(); ++i) {
    std::vector<double> row = {traj.times_ns[i], traj.ratios[i],
                               traj.jz_scaled[i], traj.photons[i]};
    row.insert(row.end(), traj.probability_tables[i].probs.begin(),
               traj.probability_tables[i].probs.end());
    row.push_back(traj.trace_drift[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table spectrum_table(const ExperimentConfig& cfg, bool& ambiguous) {
  dynamics::SweepOptions options;
  options.track_lowest = cfg.track_lowest;
  const dynamics::TrajectoryRecord traj =
      dynamics::evolve_sweep(cfg.system, cfg.schedule, options);
  const dynamics::EigenTrack& track = *traj.eigen_track;
  ambiguous = track.ambiguous;

  Table t;
  t.name = "spectrum";
  t.columns = {{"time_ns", "ns"}, {"ratio", "dimensionless"}};
  for (std::size_t k = 0; k < track.k; ++k)
    t.columns.push_back({"energy_" + std::to_string(k), "rad/ns"});
  for (std::size_t k = 0; k < track.k; ++k)
    t.columns.push_back({"pop_" + std::to_string(k), "probability"});

  for (std::size_t i = 0; i < traj.times_ns.size(); ++i) {
    std::vector<double> row = {traj.times_ns[i], traj.ratios[i]};
    row.insert(row.end(), track.energies[i].begin(), track.energies[i].end());
    row.insert(row.end(), track.populations[i].begin(), track.populations[i].end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table uncertainty_table(const ExperimentConfig& cfg) {
  Table t;
  t.name = "uncertainty";
  if (cfg.target == config::UncertaintyTarget::sweep) {
    const measurement::UncertaintyResult res = measurement::monte_carlo_uncertainty(
        cfg.system, cfg.schedule, cfg.sigma_mhz, cfg.n_runs, *cfg.seed,
        cfg.distribution);
    t.columns = {{"time_ns", "ns"},
                 {"ratio", "dimensionless"},
                 {"jz_mean", "dimensionless"},
                 {"jz_sd", "dimensionless"}};
    for (std::size_t i = 0; i < res.grid.size(); ++i)
      t.rows.push_back({res.grid[i],
                        dynamics::schedule_ratio(res.grid[i], cfg.schedule),
                        res.mean[i], res.sd[i]});
  } else {
    const measurement::UncertaintyResult res =
        measurement::monte_carlo_scan_uncertainty(cfg.system, cfg.scan_ratios(),
                                                  cfg.sigma_mhz, cfg.n_runs,
                                                  *cfg.seed, cfg.distribution);
    t.columns = {{"ratio", "dimensionless"},
                 {"jz_mean", "dimensionless"},
                 {"jz_sd", "dimensionless"}};
    for (std::size_t i = 0; i < res.grid.size(); ++i)
      t.rows.push_back({res.grid[i], res.mean[i], res.sd[i]});
  }
  return t;
}

Table calibrate_table(const ExperimentConfig& cfg) {
  const double t_drive = cfg.drive_time_ns;
  const double probe_g = cfg.probe_g_mhz > 0.0
                             ? cfg.probe_g_mhz
                             : cfg.system.lambda_mhz /
                                   std::sqrt(static_cast<double>(cfg.system.n_qubits));
  std::vector<double> probe_times;
  for (double v = 0.0; v <= 150.0 + 1e-9; v += 0.5) probe_times.push_back(v);

  Table t;
  t.name = "calibrate";
  t.columns = {{"omega_mhz", "MHz"},
               {"alpha_expected", "dimensionless"},
               {"alpha_direct", "dimensionless"},
               {"alpha_probed", "dimensionless"},
               {"omega_recovered_mhz", "MHz"},
               {"relative_error", "dimensionless"}};

  for (double omega : cfg.omega_list_mhz) {
    // Lossless amplitude bound sizes the cutoff: keep the whole Poisson
    // bulk plus a six-sigma tail below the truncation.
    const double alpha_max = units::angular_from_mhz(omega) * t_drive;
    const double nbar = alpha_max * alpha_max;
    const std::size_t ncut =
        std::max<std::size_t>(cfg.system.fock_cutoff,
                              static_cast<std::size_t>(
                                  std::ceil(nbar + 6.0 * std::sqrt(nbar) + 4.0)));

    // The calibration tone drives the bare resonator: one parked qubit at
    // negligible coupling stands in for "no qubit", cavity rates carried
    // over from the configured system.
    model::SystemParams cavity;
    cavity.n_qubits = 1;
    cavity.fock_cutoff = ncut;
    cavity.lambda_mhz = 1e-6;
    cavity.delta_r_mhz = 0.0;
    cavity.omega_drive_mhz = omega;
    cavity.kappa1_mhz = cfg.system.kappa1_mhz;
    cavity.kappa2_mhz = cfg.system.kappa2_mhz;
    cavity.gamma1_mhz = 0.0;
    cavity.gamma2_mhz = 0.0;

    linalg::ComplexMatrix rho0(cavity.composite_dim(), cavity.composite_dim());
    rho0(0, 0) = 1.0;
    const dynamics::StaticRun run = dynamics::evolve_static(
        cavity, /*delta_q_mhz=*/0.0, rho0, t_drive, cfg.schedule.dt_ns);

    const calibration::PhotonPopulations pops =
        calibration::photon_populations_from_density(run.rho, 1, ncut);
    const double alpha_direct = calibration::infer_alpha(pops);

    const std::vector<double> signal =
        calibration::rabi_probe_signal(pops, probe_g, probe_times);
    const calibration::PhotonPopulations probed =
        calibration::infer_populations(signal, probe_times, probe_g, ncut);
    const double alpha_probed = calibration::infer_alpha(probed);

    const double omega_back =
        calibration::recover_drive_strength(1.0, alpha_probed, t_drive);
    t.rows.push_back({omega, alpha_max, alpha_direct, alpha_probed, omega_back,
                      (omega_back - omega) / omega});
  }
  return t;
}

Table parity_table(const ExperimentConfig& cfg) {
  const model::OperatorSet ops = model::build_operator_set(cfg.system);
  // Representative transmon-scale lab frequencies; the commutator norm of
  // the undriven model vanishes for any choice.
  const linalg::ComplexMatrix h_tc = model::build_undriven_tc_hamiltonian(
      5000.0, 5000.0, cfg.system.lambda_mhz, cfg.system.n_qubits,
      cfg.system.fock_cutoff);
  const double dq = dynamics::ratio_to_detuning(1.0, cfg.system.lambda_mhz,
                                                cfg.system.delta_r_mhz);
  const linalg::ComplexMatrix h0 =
      model::build_driven_tc_hamiltonian(ops, cfg.system, dq);

  Table t;
  t.name = "parity-check";
  t.columns = {{"hamiltonian", "0=undriven_tc 1=driven"},
               {"commutator_norm", "rad/ns"}};
  t.rows.push_back({0.0, model::parity_commutator_norm(h_tc, ops.parity)});
  t.rows.push_back({1.0, model::parity_commutator_norm(h0, ops.parity)});
  return t;
}

void echo_config(const ExperimentConfig& cfg,
                 std::vector<std::pair<std::string, std::string>>& meta) {
  const auto& s = cfg.system;
  meta.emplace_back("system.n_qubits", std::to_string(s.n_qubits));
  meta.emplace_back("system.fock_cutoff", std::to_string(s.fock_cutoff));
  meta.emplace_back("system.lambda_mhz", fmt(s.lambda_mhz));
  meta.emplace_back("system.delta_r_mhz", fmt(s.delta_r_mhz));
  meta.emplace_back("system.omega_drive_mhz", fmt(s.omega_drive_mhz));
  if (!s.omega_qubit_drive_mhz.empty())
    meta.emplace_back("system.omega_qubit_drive_mhz",
                      fmt_list(s.omega_qubit_drive_mhz));
  meta.emplace_back("system.a2_shift_mhz", fmt(s.a2_shift_mhz));
  meta.emplace_back("system.kappa1_mhz", fmt(s.kappa1_mhz));
  meta.emplace_back("system.kappa2_mhz", fmt(s.kappa2_mhz));
  meta.emplace_back("system.gamma1_mhz", fmt(s.gamma1_mhz));
  meta.emplace_back("system.gamma2_mhz", fmt(s.gamma2_mhz));
  meta.emplace_back("schedule.ratio_start", fmt(cfg.schedule.ratio_start));
  meta.emplace_back("schedule.ratio_end", fmt(cfg.schedule.ratio_end));
  meta.emplace_back("schedule.tau_ns", fmt(cfg.schedule.tau_ns));
  meta.emplace_back("schedule.dt_ns", fmt(cfg.schedule.dt_ns));
  meta.emplace_back("schedule.drive_on", cfg.schedule.drive_on ? "true" : "false");
  meta.emplace_back("scan.ratio_min", fmt(cfg.ratio_min));
  meta.emplace_back("scan.ratio_max", fmt(cfg.ratio_max));
  meta.emplace_back("scan.ratio_step", fmt(cfg.ratio_step));
  if (!cfg.qubit_counts.empty())
    meta.emplace_back("scan.qubit_counts", fmt_list(cfg.qubit_counts));
  meta.emplace_back("scan.track_lowest", std::to_string(cfg.track_lowest));
  meta.emplace_back("scan.sigma_mhz", fmt(cfg.sigma_mhz));
  meta.emplace_back("scan.n_runs", std::to_string(cfg.n_runs));
  meta.emplace_back("scan.distribution",
                    cfg.distribution == measurement::OffsetDistribution::uniform
                        ? "uniform"
                        : "gaussian");
  meta.emplace_back("scan.target",
                    cfg.target == config::UncertaintyTarget::sweep ? "sweep"
                                                                   : "ground-scan");
  meta.emplace_back("scan.omega_list_mhz", fmt_list(cfg.omega_list_mhz));
  meta.emplace_back("scan.drive_time_ns", fmt(cfg.drive_time_ns));
  meta.emplace_back("scan.probe_g_mhz", fmt(cfg.probe_g_mhz));
  meta.emplace_back("output.directory", cfg.output_dir);
  if (cfg.seed) meta.emplace_back("seed", std::to_string(*cfg.seed));
  meta.emplace_back("emit_plot", cfg.emit_plot ? "true" : "false");
  meta.emplace_back("threads", std::to_string(cfg.threads));
}

}  // namespace

ResultBundle run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Table> tables;
  bool spectrum_ambiguous = false;
  try {
    cfg.validate();
    switch (cfg.experiment) {
      case Experiment::ground_scan:
        tables.push_back(ground_scan_table(cfg));
        break;
      case Experiment::mean_field:
        tables.push_back(mean_field_table(cfg));
        break;
      case Experiment::sweep:
        tables.push_back(sweep_table(cfg));
        break;
      case Experiment::spectrum:
        tables.push_back(spectrum_table(cfg, spectrum_ambiguous));
        break;
      case Experiment::uncertainty:
        tables.push_back(uncertainty_table(cfg));
        break;
      case Experiment::calibrate:
        tables.push_back(calibrate_table(cfg));
        break;
      case Experiment::parity_check:
        tables.push_back(parity_table(cfg));
        break;
    }
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(experiment_name(cfg.experiment)) + ": " +
                             e.what());
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  ResultBundle bundle;
  bundle.metadata.emplace_back("experiment", experiment_name(cfg.experiment));
  bundle.metadata.emplace_back("tool_version", kToolVersion);
  bundle.metadata.emplace_back("wall_time_s", fmt(wall));
  if (cfg.experiment == Experiment::spectrum)
    bundle.metadata.emplace_back("eigen_track_ambiguous",
                                 spectrum_ambiguous ? "true" : "false");
  echo_config(cfg, bundle.metadata);
  bundle.tables = std::move(tables);
  return bundle;
}

std::string emit_plot_script(const ResultBundle& bundle) {
  if (bundle.tables.empty())
    throw std::invalid_argument("emit_plot_script: bundle has no tables");

  const Table* plot = nullptr;
  bool per_qubit_curves = false;
  bool band = false;
  for (const Table& t : bundle.tables) {
    bool has_ratio = false, has_jz = false, has_mean = false, has_n = false,
         has_sd = false;
    for (const auto& c : t.columns) {
      has_ratio |= c.name == "ratio";
      has_jz |= c.name == "jz_scaled";
      has_mean |= c.name == "jz_mean";
      has_n |= c.name == "n_qubits";
      has_sd |= c.name == "jz_sd";
    }
    if (has_ratio && (has_jz || has_mean)) {
      plot = &t;
      per_qubit_curves = has_n;
      band = has_mean && has_sd;
      break;
    }
  }
  if (!plot)
    throw std::invalid_argument(
        "emit_plot_script: no table with a ratio axis and a jz column");

  const std::string csv_name = plot->name + ".csv";
  std::string script;
  script +=
      "#!/usr/bin/env python3\n"
      "\"\"\"Render jz against the coupling ratio from " + csv_name +
      " (run from the directory containing it).\"\"\"\n\n"
      "import csv\n";
  if (per_qubit_curves) script += "from collections import defaultdict\n";
  script +=
      "\n"
      "import matplotlib\n"
      "\n"
      "matplotlib.use(\"Agg\")\n"
      "import matplotlib.pyplot as plt\n"
      "\n"
      "\n"
      "def load(path):\n"
      "    with open(path, newline=\"\") as fh:\n"
      "        rows = list(csv.reader(fh))\n"
      "    names = [field.rsplit(\" (\", 1)[0] for field in rows[0]]\n"
      "    cols = {name: [] for name in names}\n"
      "    for row in rows[1:]:\n"
      "        for name, cell in zip(names, row):\n"
      "            cols[name].append(float(cell))\n"
      "    return cols\n"
      "\n"
      "\n"
      "cols = load(\"" + csv_name + "\")\n"
      "fig, ax = plt.subplots(figsize=(5.4, 3.6))\n";
  if (per_qubit_curves) {
    script +=
        "series = defaultdict(list)\n"
        "for n, r, z in zip(cols[\"n_qubits\"], cols[\"ratio\"], "
        "cols[\"jz_scaled\"]):\n"
        "    series[int(n)].append((r, z))\n"
        "for n in sorted(series):\n"
        "    xs, ys = zip(*series[n])\n"
        "    ax.plot(xs, ys, label=f\"N = {n}\")\n"
        "ax.legend(frameon=False)\n";
  } else if (band) {
    script +=
        "xs, ys, sd = cols[\"ratio\"], cols[\"jz_mean\"], cols[\"jz_sd\"]\n"
        "ax.plot(xs, ys, label=\"mean\")\n"
        "ax.fill_between(xs, [y - s for y, s in zip(ys, sd)],\n"
        "                [y + s for y, s in zip(ys, sd)], alpha=0.3, "
        "linewidth=0)\n"
        "ax.legend(frameon=False)\n";
  } else {
    const char* ycol =
        std::any_of(plot->columns.begin(), plot->columns.end(),
                    [](const csvio::Column& c) { return c.name == "jz_scaled"; })
            ? "jz_scaled"
            : "jz_mean";
    script += "ax.plot(cols[\"ratio\"], cols[\"" + std::string(ycol) + "\"])\n";
  }
  script +=
      "ax.axvline(1.0, color=\"0.6\", linestyle=\":\", linewidth=1.0)\n"
      "ax.set_xlabel(r\"$\\lambda/\\lambda_c$\")\n"
      "ax.set_ylabel(r\"$\\langle J_z\\rangle/(N/2)$\")\n"
      "fig.tight_layout()\n"
      "fig.savefig(\"" + plot->name + ".png\", dpi=200)\n";
  return script;
}

std::vector<std::string> write_bundle(const ResultBundle& bundle,
                                      const std::string& dir) {
  std::string experiment;
  for (const auto& [key, value] : bundle.metadata)
    if (key == "experiment") {
      experiment = value;
      break;
    }
  if (experiment.empty())
    throw std::invalid_argument("write_bundle: bundle lacks experiment metadata");

  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  for (const Table& t : bundle.tables) {
    const std::string path = dir + "/" + t.name + ".csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_bundle: cannot open " + path);
    out << csvio::format_csv(t);
    if (!out) throw std::runtime_error("write_bundle: failed writing " + path);
    written.push_back(path);
  }

  const std::string meta_path = dir + "/" + experiment + ".meta";
  std::ofstream meta(meta_path, std::ios::binary);
  if (!meta) throw std::runtime_error("write_bundle: cannot open " + meta_path);
  for (const auto& [key, value] : bundle.metadata)
    meta << key << " = " << value << "\n";
  for (const Table& t : bundle.tables)
    meta << "table." << t.name << ".rows = " << t.rows.size() << "\n";
  if (!meta) throw std::runtime_error("write_bundle: failed writing " + meta_path);
  written.push_back(meta_path);
  return written;
}

}  // namespace tc::experiment

#include "tc/config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string_view>
#include <system_error>

namespace tc::config {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// Drop a trailing comment: '#' or ';' at the start of the line or preceded
// by whitespace (so values themselves may contain either character).
std::string_view strip_comment(std::string_view line) {
  for (std::size_t i = 0; i < line.size(); ++i)
    if ((line[i] == '#' || line[i] == ';') &&
        (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t'))
      return line.substr(0, i);
  return line;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("parse_config: " + path + ": " + what);
}

double to_double(const std::string& path, std::string_view v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    fail(path, "expected a number, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t to_count(const std::string& path, std::string_view v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    fail(path, "expected a nonnegative integer, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(const std::string& path, std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail(path, "expected true or false, got '" + std::string(v) + "'");
}

template <typename T, typename Parse>
std::vector<T> to_list(const std::string& path, std::string_view v, Parse parse) {
  std::vector<T> out;
  while (true) {
    const std::size_t pos = v.find(',');
    const std::string_view item = trim(v.substr(0, pos));
    if (item.empty()) fail(path, "empty list entry");
    out.push_back(parse(path, item));
    if (pos == std::string_view::npos) return out;
    v.remove_prefix(pos + 1);
  }
}

// One assignment, dispatched on (section, key).  Returns false when the
// key does not belong to the section so the caller can report the path.
bool apply(ExperimentConfig& cfg, const std::string& section,
           const std::string& key, std::string_view value,
           const std::string& path) {
  if (section.empty()) {
    if (key == "experiment") {
      cfg.experiment = experiment_from_name(std::string(value));
      return true;
    }
    if (key == "seed") {
      cfg.seed = to_count(path, value);
      return true;
    }
    if (key == "emit_plot") {
      cfg.emit_plot = to_bool(path, value);
      return true;
    }
    return false;
  }
  if (section == "system") {
    auto& s = cfg.system;
    if (key == "n_qubits") s.n_qubits = to_count(path, value);
    else if (key == "fock_cutoff") s.fock_cutoff = to_count(path, value);
    else if (key == "lambda_mhz") s.lambda_mhz = to_double(path, value);
    else if (key == "delta_r_mhz") s.delta_r_mhz = to_double(path, value);
    else if (key == "omega_drive_mhz") s.omega_drive_mhz = to_double(path, value);
    else if (key == "omega_qubit_drive_mhz")
      s.omega_qubit_drive_mhz = to_list<double>(path, value, to_double);
    else if (key == "a2_shift_mhz") s.a2_shift_mhz = to_double(path, value);
    else if (key == "kappa1_mhz") s.kappa1_mhz = to_double(path, value);
    else if (key == "kappa2_mhz") s.kappa2_mhz = to_double(path, value);
    else if (key == "gamma1_mhz") s.gamma1_mhz = to_double(path, value);
    else if (key == "gamma2_mhz") s.gamma2_mhz = to_double(path, value);
    else return false;
    return true;
  }
  if (section == "schedule") {
    auto& s = cfg.schedule;
    if (key == "ratio_start") s.ratio_start = to_double(path, value);
    else if (key == "ratio_end") s.ratio_end = to_double(path, value);
    else if (key == "tau_ns") s.tau_ns = to_double(path, value);
    else if (key == "dt_ns") s.dt_ns = to_double(path, value);
    else if (key == "drive_on") s.drive_on = to_bool(path, value);
    else return false;
    return true;
  }
  if (section == "scan") {
    if (key == "ratio_min") cfg.ratio_min = to_double(path, value);
    else if (key == "ratio_max") cfg.ratio_max = to_double(path, value);
    else if (key == "ratio_step") cfg.ratio_step = to_double(path, value);
    else if (key == "qubit_counts")
      cfg.qubit_counts = to_list<std::size_t>(
          path, value,
          [](const std::string& p, std::string_view v) -> std::size_t {
            return static_cast<std::size_t>(to_count(p, v));
          });
    else if (key == "track_lowest") cfg.track_lowest = to_count(path, value);
    else if (key == "sigma_mhz") cfg.sigma_mhz = to_double(path, value);
    else if (key == "n_runs") cfg.n_runs = to_count(path, value);
    else if (key == "distribution") {
      if (value == "uniform")
        cfg.distribution = measurement::OffsetDistribution::uniform;
      else if (value == "gaussian")
        cfg.distribution = measurement::OffsetDistribution::gaussian;
      else
        fail(path, "expected uniform or gaussian, got '" + std::string(value) + "'");
    } else if (key == "target") {
      if (value == "sweep") cfg.target = UncertaintyTarget::sweep;
      else if (value == "ground-scan") cfg.target = UncertaintyTarget::ground_scan;
      else fail(path, "expected sweep or ground-scan, got '" + std::string(value) + "'");
    } else if (key == "omega_list_mhz")
      cfg.omega_list_mhz = to_list<double>(path, value, to_double);
    else if (key == "drive_time_ns") cfg.drive_time_ns = to_double(path, value);
    else if (key == "probe_g_mhz") cfg.probe_g_mhz = to_double(path, value);
    else return false;
    return true;
  }
  if (section == "output") {
    if (key == "directory") {
      cfg.output_dir = std::string(value);
      return true;
    }
  }
  return false;
}

}  // namespace

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::ground_scan: return "ground-scan";
    case Experiment::mean_field: return "mean-field";
    case Experiment::sweep: return "sweep";
    case Experiment::spectrum: return "spectrum";
    case Experiment::uncertainty: return "uncertainty";
    case Experiment::calibrate: return "calibrate";
    case Experiment::parity_check: return "parity-check";
  }
  throw std::logic_error("experiment_name: unhandled enum value");
}

Experiment experiment_from_name(const std::string& name) {
  for (Experiment e : {Experiment::ground_scan, Experiment::mean_field,
                       Experiment::sweep, Experiment::spectrum,
                       Experiment::uncertainty, Experiment::calibrate,
                       Experiment::parity_check})
    if (name == experiment_name(e)) return e;
  throw std::invalid_argument("unknown experiment '" + name +
                              "' (expected one of ground-scan, mean-field, "
                              "sweep, spectrum, uncertainty, calibrate, "
                              "parity-check)");
}

std::vector<double> ExperimentConfig::scan_ratios() const {
  const auto count =
      static_cast<std::size_t>(std::floor((ratio_max - ratio_min) / ratio_step + 1e-9));
  std::vector<double> out(count + 1);
  for (std::size_t i = 0; i <= count; ++i)
    out[i] = ratio_min + static_cast<double>(i) * ratio_step;
  return out;
}

void ExperimentConfig::validate() const {
  system.validate();
  const bool needs_grid = experiment == Experiment::ground_scan ||
                          experiment == Experiment::mean_field ||
                          (experiment == Experiment::uncertainty &&
                           target == UncertaintyTarget::ground_scan);
  if (needs_grid) {
    if (!(ratio_step > 0.0))
      throw std::invalid_argument("scan.ratio_step must be positive");
    if (!(ratio_min <= ratio_max))
      throw std::invalid_argument("scan.ratio_min must not exceed scan.ratio_max");
  }
  for (std::size_t n : qubit_counts)
    if (n < 1)
      throw std::invalid_argument("scan.qubit_counts entries must be >= 1");
  if (experiment == Experiment::spectrum && track_lowest < 1)
    throw std::invalid_argument("scan.track_lowest must be >= 1");
  if (experiment == Experiment::calibrate) {
    if (omega_list_mhz.empty())
      throw std::invalid_argument("scan.omega_list_mhz must not be empty");
    if (!(drive_time_ns > 0.0))
      throw std::invalid_argument("scan.drive_time_ns must be positive");
    if (probe_g_mhz < 0.0)
      throw std::invalid_argument("scan.probe_g_mhz must be >= 0");
  }
  if (experiment == Experiment::uncertainty) {
    if (sigma_mhz < 0.0)
      throw std::invalid_argument("scan.sigma_mhz must be >= 0");
    if (n_runs < 2)
      throw std::invalid_argument("scan.n_runs must be >= 2");
    if (!seed)
      throw std::invalid_argument(
          "uncertainty needs a seed (config key 'seed' or --seed)");
  } else if (seed) {
    throw std::invalid_argument(
        std::string("seed is only accepted for uncertainty runs; ") +
        experiment_name(experiment) + " is deterministic");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::string section;
  std::set<std::string> seen;
  bool have_experiment = false;

  std::string_view rest(text);
  std::size_t line_no = 0;
  while (!rest.empty()) {
    const std::size_t eol = rest.find('\n');
    std::string_view line =
        eol == std::string_view::npos ? rest : rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    ++line_no;

    line = trim(strip_comment(line));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("parse_config: line " +
                                    std::to_string(line_no) +
                                    ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "system" && section != "schedule" && section != "scan" &&
          section != "output")
        throw std::invalid_argument("parse_config: unknown section '" + section +
                                    "'");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("parse_config: line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string path = section.empty() ? key : section + "." + key;
    if (key.empty()) fail(path, "empty key");
    if (!seen.insert(path).second) fail(path, "duplicate key");

    if (!apply(cfg, section, key, value, path))
      throw std::invalid_argument("parse_config: unknown key '" + path + "'");
    if (section.empty() && key == "experiment") have_experiment = true;
  }

  if (!have_experiment)
    throw std::invalid_argument("parse_config: missing required key 'experiment'");
  return cfg;
}

}  // namespace tc::config

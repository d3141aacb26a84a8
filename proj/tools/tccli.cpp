// Experiment harness: reads an INI config describing one experiment, runs
// it against the simulator library, and writes CSV tables plus a .meta
// run description (and, on request, a matplotlib script) into the output
// directory.  Exits nonzero with a message on any config error, module
// error, or violated trajectory invariant.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tc/config.hpp"
#include "tc/experiment.hpp"
#include "tc/linalg.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// TCCLI_MAX_DIM caps the composite Hilbert-space dimension (the builders
// refuse anything larger); unset keeps the library default.
void apply_dimension_cap() {
  const char* cap = std::getenv("TCCLI_MAX_DIM");
  if (!cap || !*cap) return;
  std::size_t value = 0;
  const std::string text(cap);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || value == 0)
    throw std::runtime_error("TCCLI_MAX_DIM must be a positive integer, got '" +
                             text + "'");
  tc::linalg::set_max_dimension(value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven Tavis-Cummings experiment harness"};
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  bool emit_plot = false;

  app.add_option("config", config_path, "experiment config file (INI)")
      ->required();
  app.add_option("--output", output_dir,
                 "output directory (overrides [output] directory)");
  app.add_option("--seed", seed,
                 "Monte-Carlo seed (uncertainty runs only; overrides the "
                 "config key)");
  app.add_option("--threads", threads, "workers for independent scan points")
      ->check(CLI::PositiveNumber);
  app.add_flag("--emit-plot", emit_plot,
               "also write a matplotlib script next to the CSV");
  CLI11_PARSE(app, argc, argv);

  try {
    apply_dimension_cap();

    tc::config::ExperimentConfig cfg = tc::config::parse_config(read_file(config_path));
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (seed) cfg.seed = *seed;
    if (emit_plot) cfg.emit_plot = true;
    cfg.threads = threads;

    const tc::experiment::ResultBundle bundle = tc::experiment::run_experiment(cfg);
    std::vector<std::string> written =
        tc::experiment::write_bundle(bundle, cfg.output_dir);

    if (cfg.emit_plot) {
      const std::string script = tc::experiment::emit_plot_script(bundle);
      const std::string path = cfg.output_dir + "/plot_" +
                               tc::config::experiment_name(cfg.experiment) + ".py";
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open " + path);
      out << script;
      if (!out) throw std::runtime_error("failed writing " + path);
      written.push_back(path);
    }

    for (const std::string& path : written) std::cout << path << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

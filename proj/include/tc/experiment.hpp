#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tc/config.hpp"
#include "tc/csvio.hpp"

namespace tc::experiment {

inline constexpr const char* kToolVersion = "1.0.0";

// What a run hands back: an ordered key/value metadata block (config echo,
// tool version, wall time) plus one or more numeric tables.
struct ResultBundle {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<csvio::Table> tables;
};

// Validate the config, dispatch to the matching module, and package the
// results.  Deterministic for a fixed (config, seed); module errors are
// rethrown with the experiment name prefixed.
ResultBundle run_experiment(const config::ExperimentConfig& cfg);

// A standalone matplotlib script rendering jz against the coupling ratio
// from the bundle's CSV (one curve per qubit count when the table carries
// an n_qubits column, a mean +/- sd band for uncertainty tables), with a
// vertical marker at ratio = 1.  References only relative paths, so it
// runs from inside the output directory.  Throws when the bundle has no
// ratio-keyed jz table.
std::string emit_plot_script(const ResultBundle& bundle);

// Write <dir>/<table>.csv for every table plus <dir>/<experiment>.meta,
// creating the directory if needed; returns the written paths.
std::vector<std::string> write_bundle(const ResultBundle& bundle,
                                      const std::string& dir);

}  // namespace tc::experiment

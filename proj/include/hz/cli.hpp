#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hz/boundary_coding.hpp"
#include "hz/transfer_operator.hpp"
#include "hz/verification.hpp"

namespace hz::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

/// Command-line values that enter the computation (and therefore the config hash).
struct Overrides {
  std::optional<int> nodes;
  std::optional<double> L_max;
  double tolerance_scale = 1.0;
};

struct RunConfig {
  explicit RunConfig(MarkovPartition p) : partition(std::move(p)) {}

  MarkovPartition partition;
  double L_max = 18.0;
  std::vector<cplx> s_grid;
  Discretization discretization;
  std::vector<std::string> observables;
  SearchWindow window;
  std::filesystem::path output_dir;
  Tolerances tolerances;
  /// Word-length cutoff for the length spectrum when the group has no disc data.
  std::optional<int> word_cutoff;
  std::string canonical;  // sorted-key dump of the effective config
  std::string hash;       // sha256 of `canonical`
};

/// Validates the config text. Relative coding-table paths resolve against `base_dir`.
/// Throws SchemaError naming the offending field.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir, const Overrides& o = {});
RunConfig load_config(const std::filesystem::path& path, const Overrides& o = {});

/// SchottkyDisc of a disc-model generator: the isometric circle of its inverse.
SchottkyDisc isometric_disc(const MoebiusMap& g);

struct Options {
  std::string command;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  int threads = 1;
  Overrides overrides;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"spectrum", "zeta", "resonances", "ps-residue", "verify"};
  return c;
}

/// Runs one subcommand. Exit code 0 when every check passes, 1 on a failed numerical check,
/// 2 on a config or schema violation. Diagnostics go to `log`.
int run(const Options& opt, std::ostream& log);

}  // namespace hz::cli

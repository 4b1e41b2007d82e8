#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "optpart/scheme.hpp"

namespace optpart {

/// Everything a command-line run needs.
struct RunSpec {
  SchemeConfig scheme;
  int dim = 2;
  int grid_n = 256;
  int k = 4;
  std::uint64_t seed = 0;
  std::string mask_source;  // empty, a PGM path, or shape:name[:params]
  std::filesystem::path out_dir = "out";
  int snapshot_every = 0;  // 0 disables snapshots
  int tile_reps = 0;       // 0 disables the tiled export
  bool dump_fields = false;

  GridSpec grid() const { return GridSpec(dim, grid_n); }
};

/// Thrown by parse_config for --help; what() is the usage text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reals such as `0.1`, `1/128`, `pi/16` or `2pi`.
double parse_real(const std::string& text);

/// Schedule from a comma-separated list: all entries but the last are the
/// warm-up, the last is the steady step.
TauSchedule parse_tau_schedule(const std::string& text);

/// Parses flags (args excludes the program name). A `--config FILE` of flat
/// `key = value` lines supplies defaults that flags override. Builds the
/// mask, so a missing or malformed mask file is reported here.
/// Throws ConfigError for bad input and HelpRequested for --help.
RunSpec parse_config(const std::vector<std::string>& args);

}  // namespace optpart

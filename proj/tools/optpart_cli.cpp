#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "optpart/config.hpp"
#include "optpart/errors.hpp"
#include "optpart/init.hpp"
#include "optpart/io.hpp"
#include "optpart/scheme.hpp"

namespace {

std::string label_file(const optpart::RunSpec& spec, const std::string& stem) {
  return stem + (spec.dim == 3 ? ".vtk" : ".pgm");
}

int execute(const optpart::RunSpec& spec) {
  using namespace optpart;
  const GridSpec grid = spec.grid();
  const SchemeConfig& cfg = spec.scheme;
  const PartitionState init = voronoi_init(grid, spec.k, spec.seed, cfg.bc, cfg.mask_ptr());
  export_labels(init, spec.out_dir / label_file(spec, "labels_init"));

  StepObserver observer;
  if (spec.snapshot_every > 0) {
    observer = [&](int it, const PartitionState& s, const EnergyRecord&) {
      if (it % spec.snapshot_every == 0) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "labels_%06d", it);
        export_labels(s, spec.out_dir / "snapshots" / label_file(spec, stem));
      }
    };
  }

  const RunResult result = run(cfg, init, observer);
  write_energy_csv(result.trace, spec.out_dir / "energy.csv");
  export_labels(result.state, spec.out_dir / label_file(spec, "labels"));
  if (spec.tile_reps > 0)
    export_tiling(result.state, spec.tile_reps, spec.out_dir / label_file(spec, "labels_tiled"));
  if (spec.dump_fields) dump_fields(result.state, spec.out_dir / "fields");

  const EnergyRecord& last = result.trace.back();
  const char* reason = result.reason == StopReason::labels_fixed ? "labels fixed"
                       : result.reason == StopReason::frozen     ? "frozen by failed correction"
                                                                 : "iteration cap";
  std::printf("%s: %d iterations (%s), energy %.12g -> %.12g, outputs in %s\n",
              std::string(variant_name(cfg.variant)).c_str(), last.iter, reason,
              result.trace.front().energy, last.energy, spec.out_dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  optpart::RunSpec spec;
  try {
    spec = optpart::parse_config(args);
  } catch (const optpart::HelpRequested& h) {
    std::fputs(h.what(), stdout);
    return 0;
  } catch (const optpart::ConfigError& e) {
    std::fprintf(stderr, "optpart: %s\n", e.what());
    return 2;
  }
  try {
    return execute(spec);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "optpart: %s\n", e.what());
    return 1;
  }
}

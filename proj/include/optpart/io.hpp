#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "optpart/grid.hpp"
#include "optpart/scheme.hpp"

namespace optpart {

/// Columns iter,energy,min_value,max_norm_dev,sigma,secant_iters,stopped.
/// Reals use 17 significant digits; sigma is empty for steps without a
/// correction.
void write_energy_csv(const EnergyTrace& trace, const std::filesystem::path& path);

/// Gray level for a label: (label + 1) * 255 / k, and 0 for kNoLabel.
std::uint8_t label_gray(int label, int k);

/// 2D: binary PGM, one row per y index starting at y = -pi.
/// 3D: legacy ASCII VTK STRUCTURED_POINTS with an int `label` scalar
/// (kNoLabel written as -1).
void export_labels(const PartitionState& s, const std::filesystem::path& path);

/// Label map repeated `reps` times along every axis, same formats as
/// export_labels.
void export_tiling(const PartitionState& s, int reps, const std::filesystem::path& path);

/// Gray image: 255 where the two label maps differ, else 0.
void export_label_diff(const GridSpec& grid, const std::vector<int>& a, const std::vector<int>& b,
                       const std::filesystem::path& path);

struct GrayImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::uint8_t> pixels;  // row-major
};

/// Reads 8-bit P5 or P2 files. Throws ConfigError on malformed input.
GrayImage read_pgm(const std::filesystem::path& path);

/// 2D mask from a PGM whose size matches the grid; nonzero pixels are
/// inside.
DomainMask read_mask_pgm(const std::filesystem::path& path, const GridSpec& grid);

struct VtkLabels {
  std::array<int, 3> dims{0, 0, 0};
  std::vector<int> labels;
};

/// Reads the files written by export_labels for 3D states.
VtkLabels read_vtk_labels(const std::filesystem::path& path);

/// Raw fields as little-endian float64, part-major then storage order,
/// into `<stem>.bin`, plus a `<stem>.txt` sidecar describing the layout.
void dump_fields(const PartitionState& s, const std::filesystem::path& stem);

}  // namespace optpart

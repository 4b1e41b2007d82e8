#include "optpart/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "optpart/errors.hpp"

namespace optpart {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path, bool binary) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Label map tiled reps times along each axis; reps = 1 returns a copy.
std::vector<int> tile(const GridSpec& g, const std::vector<int>& labels, int reps) {
  const std::size_t n = static_cast<std::size_t>(g.n());
  const std::size_t m = n * static_cast<std::size_t>(reps);
  std::size_t total = 1;
  for (int a = 0; a < g.dim(); ++a) total *= m;
  std::vector<int> out(total);
  for (std::size_t j = 0; j < total; ++j) {
    std::size_t rest = j;
    std::size_t src = 0;
    std::size_t stride = 1;
    for (int a = 0; a < g.dim(); ++a) {
      src += (rest % m % n) * stride;
      rest /= m;
      stride *= n;
    }
    out[j] = labels[src];
  }
  return out;
}

void write_pgm(const fs::path& path, int side, const std::vector<std::uint8_t>& pixels) {
  auto out = open_out(path, true);
  out << "P5\n" << side << ' ' << side << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_vtk(const fs::path& path, int side, double spacing, const std::vector<int>& labels) {
  auto out = open_out(path, false);
  out << "# vtk DataFile Version 3.0\npartition labels\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << side << ' ' << side << ' ' << side << '\n';
  out << "ORIGIN " << real(-3.14159265358979323846) << ' ' << real(-3.14159265358979323846) << ' '
      << real(-3.14159265358979323846) << '\n';
  out << "SPACING " << real(spacing) << ' ' << real(spacing) << ' ' << real(spacing) << '\n';
  out << "POINT_DATA " << labels.size() << "\nSCALARS label int 1\nLOOKUP_TABLE default\n";
  for (std::size_t j = 0; j < labels.size(); ++j)
    out << labels[j] << ((j + 1) % static_cast<std::size_t>(side) == 0 ? '\n' : ' ');
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_label_image(const GridSpec& g, int k, const std::vector<int>& labels, int side,
                       const fs::path& path) {
  if (g.dim() == 2) {
    std::vector<std::uint8_t> px(labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j) px[j] = label_gray(labels[j], k);
    write_pgm(path, side, px);
  } else if (g.dim() == 3) {
    write_vtk(path, side, g.spacing(), labels);
  } else {
    throw std::invalid_argument("label export needs a 2D or 3D grid");
  }
}

/// Next whitespace-delimited token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      tok.push_back(c);
      break;
    }
  }
  while (in.get(c) && !std::isspace(static_cast<unsigned char>(c))) tok.push_back(c);
  return tok;
}

int pgm_int(std::istream& in, const fs::path& path) {
  const std::string tok = pgm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size() && v >= 0) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("malformed PGM header in '" + path.string() + "'");
}

}  // namespace

void write_energy_csv(const EnergyTrace& trace, const fs::path& path) {
  auto out = open_out(path, false);
  out << "iter,energy,min_value,max_norm_dev,sigma,secant_iters,stopped\n";
  for (const EnergyRecord& r : trace) {
    out << r.iter << ',' << real(r.energy) << ',' << real(r.min_value) << ','
        << real(r.max_norm_deviation) << ',' << (std::isnan(r.sigma) ? "" : real(r.sigma)) << ','
        << r.secant_iters << ',' << (r.stopped ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::uint8_t label_gray(int label, int k) {
  if (label == kNoLabel) return 0;
  return static_cast<std::uint8_t>((label + 1) * 255 / k);
}

void export_labels(const PartitionState& s, const fs::path& path) {
  write_label_image(s.grid(), s.k(), label_map(s), s.grid().n(), path);
}

void export_tiling(const PartitionState& s, int reps, const fs::path& path) {
  if (reps < 1) throw std::invalid_argument("tiling needs reps >= 1");
  const GridSpec& g = s.grid();
  write_label_image(g, s.k(), tile(g, label_map(s), reps), g.n() * reps, path);
}

void export_label_diff(const GridSpec& grid, const std::vector<int>& a, const std::vector<int>& b,
                       const fs::path& path) {
  if (grid.dim() != 2 || a.size() != grid.size() || b.size() != grid.size())
    throw std::invalid_argument("label diff needs two 2D label maps on the grid");
  std::vector<std::uint8_t> px(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) px[j] = a[j] == b[j] ? 0 : 255;
  write_pgm(path, grid.n(), px);
}

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open mask file '" + path.string() + "'");
  const std::string magic = pgm_token(in);
  if (magic != "P5" && magic != "P2")
    throw ConfigError("'" + path.string() + "' is not a PGM file (expected P5 or P2)");
  GrayImage img;
  img.width = pgm_int(in, path);
  img.height = pgm_int(in, path);
  img.maxval = pgm_int(in, path);
  if (img.width == 0 || img.height == 0 || img.maxval == 0 || img.maxval > 255)
    throw ConfigError("unsupported PGM geometry or depth in '" + path.string() + "'");
  img.pixels.resize(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height));
  if (magic == "P5") {
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
      throw ConfigError("truncated PGM data in '" + path.string() + "'");
  } else {
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(pgm_int(in, path));
  }
  return img;
}

DomainMask read_mask_pgm(const fs::path& path, const GridSpec& grid) {
  if (grid.dim() != 2) throw ConfigError("PGM masks need a 2D grid");
  const GrayImage img = read_pgm(path);
  if (img.width != grid.n() || img.height != grid.n())
    throw ConfigError("mask '" + path.string() + "' is " + std::to_string(img.width) + "x" +
                      std::to_string(img.height) + " but the grid is " + std::to_string(grid.n()) +
                      "x" + std::to_string(grid.n()));
  std::vector<std::uint8_t> ind(img.pixels.size());
  for (std::size_t j = 0; j < ind.size(); ++j) ind[j] = img.pixels[j] != 0;
  try {
    return DomainMask(grid, std::move(ind));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("mask '" + path.string() + "': " + e.what());
  }
}

VtkLabels read_vtk_labels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  VtkLabels v;
  std::string line;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "DIMENSIONS") ls >> v.dims[0] >> v.dims[1] >> v.dims[2];
    if (key == "POINT_DATA") ls >> count;
    if (key == "LOOKUP_TABLE") break;
  }
  v.labels.resize(count);
  for (auto& l : v.labels)
    if (!(in >> l)) throw std::runtime_error("truncated VTK data in '" + path.string() + "'");
  return v;
}

void dump_fields(const PartitionState& s, const fs::path& stem) {
  static_assert(std::endian::native == std::endian::little, "dump format is little-endian");
  fs::path bin = stem;
  bin += ".bin";
  fs::path txt = stem;
  txt += ".txt";
  {
    auto out = open_out(bin, true);
    for (const Field& f : s.parts())
      out.write(reinterpret_cast<const char*>(f.values().data()),
                static_cast<std::streamsize>(f.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed for '" + bin.string() + "'");
  }
  auto out = open_out(txt, false);
  out << "format = float64-le\n"
      << "dim = " << s.grid().dim() << "\nn = " << s.grid().n() << "\nk = " << s.k() << '\n'
      << "order = part, then nodes with x fastest\n"
      << "origin = -pi\nspacing = " << real(s.grid().spacing()) << '\n';
}

}  // namespace optpart

#pragma once

#include <string>
#include <vector>

#include "kp5/grid.hpp"

namespace kp5::io {

/// Real field on a grid as read from or written to a snapshot file.
struct Snapshot {
  Grid2D grid;
  std::vector<double> values;
};

/// Header line `nx ny Lx Ly`, then nx rows of ny comma-separated values.
/// A non-empty comment is written first, each line prefixed with '#'.
void write_snapshot(const std::string& path, const Grid2D& grid, const std::vector<double>& values,
                    const std::string& comment = {});
Snapshot read_snapshot(const std::string& path);

/// Lines `j,k,re,im` for every stored mode.
void write_spectral_dump(const std::string& path, const SpectralField2D& field);

/// Boundary samples h(x_m, t_n): header `nx nt Lx t0 dt`, then nt rows of nx values.
struct BoundaryFile {
  int nx = 0;
  int nt = 0;
  double lx = 0.0;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;  // [n][m]
};

void write_boundary(const std::string& path, const BoundaryFile& b, const std::string& comment = {});
BoundaryFile read_boundary(const std::string& path);

/// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace kp5::io

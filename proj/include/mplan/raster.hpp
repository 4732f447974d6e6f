#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mplan/common.hpp"

namespace mplan {

/// 8-bit grayscale raster with a metric scale.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double meters_per_cell, std::uint8_t fill = 0);
  GrayImage(int width, int height, double meters_per_cell,
            std::vector<std::uint8_t> intensities);

  [[nodiscard]] int width() const { return size_.width; }
  [[nodiscard]] int height() const { return size_.height; }
  [[nodiscard]] GridSize size() const { return size_; }
  [[nodiscard]] double meters_per_cell() const { return meters_per_cell_; }

  [[nodiscard]] std::uint8_t at(Cell c) const { return pixels_[size_.index(c)]; }
  [[nodiscard]] std::uint8_t at(int x, int y) const { return at(Cell{x, y}); }
  void set(Cell c, std::uint8_t v) { pixels_[size_.index(c)] = v; }

  [[nodiscard]] std::span<const std::uint8_t> pixels() const { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  GridSize size_;
  double meters_per_cell_ = 1.0;
  std::vector<std::uint8_t> pixels_;
};

/// Binary free (0) / occupied (1) grid.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(GridSize size, double meters_per_cell, bool occupied = false);

  [[nodiscard]] GridSize size() const { return size_; }
  [[nodiscard]] int width() const { return size_.width; }
  [[nodiscard]] int height() const { return size_.height; }
  [[nodiscard]] double meters_per_cell() const { return meters_per_cell_; }

  [[nodiscard]] bool occupied(Cell c) const { return cells_[size_.index(c)] != 0; }
  [[nodiscard]] bool occupied(int x, int y) const { return occupied(Cell{x, y}); }
  [[nodiscard]] bool free(Cell c) const { return !occupied(c); }
  void set(Cell c, bool occupied) { cells_[size_.index(c)] = occupied ? 1 : 0; }
  void mark(const CellSet& cells);

  [[nodiscard]] std::size_t occupied_count() const;
  [[nodiscard]] std::span<const std::uint8_t> cells() const { return cells_; }

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  GridSize size_;
  double meters_per_cell_ = 1.0;
  std::vector<std::uint8_t> cells_;
};

struct Offset {
  int dx = 0;
  int dy = 0;
  friend auto operator<=>(const Offset&, const Offset&) = default;
};

enum class FootprintShape { Disk, Square };

/// Footprint as a set of cell offsets; contains the origin and is
/// point-symmetric.
class StructuringElement {
 public:
  StructuringElement(std::vector<Offset> offsets, FootprintShape shape, double nominal_size_m);

  [[nodiscard]] const std::vector<Offset>& offsets() const { return offsets_; }
  [[nodiscard]] FootprintShape shape() const { return shape_; }
  [[nodiscard]] double nominal_size_m() const { return nominal_size_m_; }
  /// Largest |dx| or |dy| over the offsets.
  [[nodiscard]] int extent() const { return extent_; }

 private:
  std::vector<Offset> offsets_;
  FootprintShape shape_;
  double nominal_size_m_;
  int extent_ = 0;
};

/// Disk of all offsets with dx^2 + dy^2 <= r^2, r = ceil(radius / scale), r >= 1.
StructuringElement disk_element(double diameter_m, double meters_per_cell);

/// Square of all offsets with |dx|, |dy| <= h, h = ceil(half side / scale), h >= 1.
StructuringElement square_element(double side_m, double meters_per_cell);

/// Minkowski dilation of the occupied set. A cell whose footprint would leave
/// the grid is occupied too, so every free output cell has its whole footprint
/// in bounds and obstacle-free.
OccupancyGrid dilate_obstacles(const OccupancyGrid& grid, const StructuringElement& se);

class PgmError : public Error {
 public:
  enum class Kind { BadMagic, BadHeader, DimensionOutOfRange, MaxvalOutOfRange, Truncated, PixelOutOfRange };

  PgmError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Parses P2 (ASCII) or P5 (binary) PGM with maxval <= 255.
GrayImage read_pgm(std::string_view bytes, double meters_per_cell);

/// Serializes as binary P5, maxval 255.
std::string write_pgm(const GrayImage& img);

GrayImage read_pgm_file(const std::filesystem::path& path, double meters_per_cell);
void write_pgm_file(const std::filesystem::path& path, const GrayImage& img);

}  // namespace mplan

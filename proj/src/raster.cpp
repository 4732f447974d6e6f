#include "mplan/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace mplan {

namespace {

void check_scale(double meters_per_cell) {
  if (!(meters_per_cell > 0.0) || !std::isfinite(meters_per_cell))
    throw InvalidArgument(fmt::format("meters_per_cell must be positive and finite, got {}", meters_per_cell));
}

void check_size(int width, int height) {
  if (width <= 0 || height <= 0)
    throw InvalidArgument(fmt::format("grid dimensions must be positive, got {}x{}", width, height));
}

// Cells needed to cover `length_m`, rounded up. The epsilon absorbs
// representation error in quotients like 0.3 / 0.1.
int cells_ceil(double length_m, double meters_per_cell) {
  const double q = length_m / meters_per_cell;
  return std::max(1, static_cast<int>(std::ceil(q - 1e-9)));
}

}  // namespace

GrayImage::GrayImage(int width, int height, double meters_per_cell, std::uint8_t fill)
    : size_{width, height}, meters_per_cell_(meters_per_cell) {
  check_size(width, height);
  check_scale(meters_per_cell);
  pixels_.assign(size_.cell_count(), fill);
}

GrayImage::GrayImage(int width, int height, double meters_per_cell, std::vector<std::uint8_t> intensities)
    : size_{width, height}, meters_per_cell_(meters_per_cell), pixels_(std::move(intensities)) {
  check_size(width, height);
  check_scale(meters_per_cell);
  if (pixels_.size() != size_.cell_count())
    throw InvalidArgument(fmt::format("expected {} intensities for a {}x{} image, got {}", size_.cell_count(),
                                      width, height, pixels_.size()));
}

OccupancyGrid::OccupancyGrid(GridSize size, double meters_per_cell, bool occupied)
    : size_(size), meters_per_cell_(meters_per_cell) {
  check_size(size.width, size.height);
  check_scale(meters_per_cell);
  cells_.assign(size_.cell_count(), occupied ? 1 : 0);
}

void OccupancyGrid::mark(const CellSet& cells) {
  for (const Cell c : cells) set(c, true);
}

std::size_t OccupancyGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

StructuringElement::StructuringElement(std::vector<Offset> offsets, FootprintShape shape, double nominal_size_m)
    : offsets_(std::move(offsets)), shape_(shape), nominal_size_m_(nominal_size_m) {
  std::sort(offsets_.begin(), offsets_.end());
  offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
  if (!std::binary_search(offsets_.begin(), offsets_.end(), Offset{0, 0}))
    throw InvalidArgument("structuring element must contain the origin");
  for (const Offset o : offsets_) {
    if (!std::binary_search(offsets_.begin(), offsets_.end(), Offset{-o.dx, -o.dy}))
      throw InvalidArgument("structuring element must be point-symmetric");
    extent_ = std::max({extent_, std::abs(o.dx), std::abs(o.dy)});
  }
}

StructuringElement disk_element(double diameter_m, double meters_per_cell) {
  if (!(diameter_m > 0.0)) throw InvalidArgument(fmt::format("disk diameter must be positive, got {}", diameter_m));
  check_scale(meters_per_cell);
  const int r = cells_ceil(diameter_m / 2.0, meters_per_cell);
  std::vector<Offset> offsets;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (dx * dx + dy * dy <= r * r) offsets.push_back({dx, dy});
  return {std::move(offsets), FootprintShape::Disk, diameter_m};
}

StructuringElement square_element(double side_m, double meters_per_cell) {
  if (!(side_m > 0.0)) throw InvalidArgument(fmt::format("square side must be positive, got {}", side_m));
  check_scale(meters_per_cell);
  const int h = cells_ceil(side_m / 2.0, meters_per_cell);
  std::vector<Offset> offsets;
  for (int dy = -h; dy <= h; ++dy)
    for (int dx = -h; dx <= h; ++dx) offsets.push_back({dx, dy});
  return {std::move(offsets), FootprintShape::Square, side_m};
}

OccupancyGrid dilate_obstacles(const OccupancyGrid& grid, const StructuringElement& se) {
  const GridSize size = grid.size();
  OccupancyGrid out(size, grid.meters_per_cell());

  int min_dx = 0, max_dx = 0, min_dy = 0, max_dy = 0;
  for (const Offset o : se.offsets()) {
    min_dx = std::min(min_dx, o.dx);
    max_dx = std::max(max_dx, o.dx);
    min_dy = std::min(min_dy, o.dy);
    max_dy = std::max(max_dy, o.dy);
  }

  // Border policy: the footprint must fit entirely on the grid.
  for (int y = 0; y < size.height; ++y)
    for (int x = 0; x < size.width; ++x)
      if (x + min_dx < 0 || x + max_dx >= size.width || y + min_dy < 0 || y + max_dy >= size.height)
        out.set({x, y}, true);

  // Stamp the reflected footprint around every obstacle. The element is
  // symmetric, but reflect anyway so the loop states the definition.
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      if (!grid.occupied(x, y)) continue;
      for (const Offset o : se.offsets()) {
        const Cell c{x - o.dx, y - o.dy};
        if (size.contains(c)) out.set(c, true);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// PGM

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::string_view bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments, then reads an unsigned decimal.
  long long header_number(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size())
      throw PgmError(PgmError::Kind::Truncated, fmt::format("PGM header ends before {}", field));
    if (!std::isdigit(static_cast<unsigned char>(bytes_[pos_])))
      throw PgmError(PgmError::Kind::BadHeader, fmt::format("PGM {} is not a number", field));
    long long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > std::numeric_limits<int>::max())
        throw PgmError(PgmError::Kind::DimensionOutOfRange, fmt::format("PGM {} overflows", field));
      ++pos_;
    }
    return v;
  }

  // ASCII sample; truncation rather than a header error when input runs out.
  long long ascii_sample() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) throw PgmError(PgmError::Kind::Truncated, "PGM pixel data truncated");
    if (!std::isdigit(static_cast<unsigned char>(bytes_[pos_])))
      throw PgmError(PgmError::Kind::BadHeader, "PGM pixel value is not a number");
    long long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = std::min<long long>(v * 10 + (bytes_[pos_] - '0'), 1 << 20);
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from binary samples.
  void single_whitespace() {
    if (pos_ >= bytes_.size()) throw PgmError(PgmError::Kind::Truncated, "PGM header truncated after maxval");
    if (!std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      throw PgmError(PgmError::Kind::BadHeader, "PGM maxval must be followed by whitespace");
    ++pos_;
  }

  [[nodiscard]] std::string_view rest() const { return bytes_.substr(pos_); }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 2;
};

constexpr long long kMaxDimension = 1 << 16;

}  // namespace

GrayImage read_pgm(std::string_view bytes, double meters_per_cell) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw PgmError(PgmError::Kind::BadMagic, "unsupported magic number (expected P2 or P5)");
  const bool binary = bytes[1] == '5';

  PgmReader in(bytes);
  const long long width = in.header_number("width");
  const long long height = in.header_number("height");
  if (width < 1 || height < 1 || width > kMaxDimension || height > kMaxDimension)
    throw PgmError(PgmError::Kind::DimensionOutOfRange,
                   fmt::format("PGM dimensions {}x{} out of range", width, height));
  const long long maxval = in.header_number("maxval");
  if (maxval < 1 || maxval > 255)
    throw PgmError(PgmError::Kind::MaxvalOutOfRange, fmt::format("PGM maxval {} out of range 1..255", maxval));

  const auto count = static_cast<std::size_t>(width * height);
  std::vector<std::uint8_t> pixels(count);
  if (binary) {
    in.single_whitespace();
    const std::string_view data = in.rest();
    if (data.size() < count)
      throw PgmError(PgmError::Kind::Truncated,
                     fmt::format("PGM pixel data truncated: {} of {} bytes", data.size(), count));
    for (std::size_t i = 0; i < count; ++i) {
      const auto v = static_cast<std::uint8_t>(data[i]);
      if (v > maxval)
        throw PgmError(PgmError::Kind::PixelOutOfRange, fmt::format("PGM sample {} exceeds maxval {}", v, maxval));
      pixels[i] = v;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const long long v = in.ascii_sample();
      if (v > maxval)
        throw PgmError(PgmError::Kind::PixelOutOfRange, fmt::format("PGM sample {} exceeds maxval {}", v, maxval));
      pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return {static_cast<int>(width), static_cast<int>(height), meters_per_cell, std::move(pixels)};
}

std::string write_pgm(const GrayImage& img) {
  std::string out = fmt::format("P5\n{} {}\n255\n", img.width(), img.height());
  out.reserve(out.size() + img.pixels().size());
  for (const std::uint8_t v : img.pixels()) out.push_back(static_cast<char>(v));
  return out;
}

GrayImage read_pgm_file(const std::filesystem::path& path, double meters_per_cell) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return read_pgm(bytes, meters_per_cell);
  } catch (const PgmError& e) {
    throw PgmError(e.kind(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_pgm_file(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  const std::string bytes = write_pgm(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace mplan

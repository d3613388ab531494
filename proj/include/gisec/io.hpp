#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <gisec/digest.hpp>
#include <gisec/ghostsim.hpp>

namespace gisec {

/// Writes content to path atomically (temp file in the same directory,
/// fsync'd, then renamed over the target).  Throws io_error on failure.
void atomic_write(const std::string &path, const std::string &content);

/// Binary mask from a plain-text portable bitmap (P1).  PBM counts 1 as
/// black/ink, which is read as "object present" (transmission 1).
struct MaskFile {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> mask;
};
MaskFile read_pbm(const std::string &path);
std::string format_pbm(int width, int height, const std::vector<std::uint8_t> &mask);

/// Portable graymap serialization.  Values are rounded to integers and the
/// header max is the observed maximum (at least 1), so the full count range
/// survives the round trip.  format_pgm emits plain P2; read_pgm accepts
/// P2 and binary P5.
std::string format_pgm(const RealImage &image);
std::string format_pgm(const CountImage &image);
struct GrayFile {
  int width{0};
  int height{0};
  int maxval{1};
  std::vector<long long> values;
};
GrayFile read_pgm(const std::string &path);

/// CSV with 6 significant digits, '.' decimal separator and LF line endings.
/// A cell holds either a number or literal text (empty for missing values).
struct CsvCell {
  bool numeric{false};
  double number{0.0};
  std::string text;

  CsvCell() = default;
  CsvCell(double v) : numeric(true), number(v) {}
  CsvCell(const char *t) : text(t) {}
  CsvCell(std::string t) : text(std::move(t)) {}
};
std::string format_csv(const std::vector<std::string> &header,
                       const std::vector<std::vector<CsvCell>> &rows);

/// Reads a whole file; throws io_error if it cannot be opened.
std::string read_file(const std::string &path);

} // namespace gisec

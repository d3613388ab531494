#include <gisec/io.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

namespace gisec {

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Skips whitespace and '#' comment lines in a plain PNM header/body.
void skip_separators(std::istream &in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      in.get();
    } else {
      return;
    }
  }
}

long long read_pnm_int(std::istream &in, const std::string &path) {
  skip_separators(in);
  long long v = 0;
  if (!(in >> v))
    throw io_error("malformed PNM data in " + path);
  return v;
}

std::string format_pgm_values(int width, int height, const std::vector<long long> &v) {
  long long maxval = 1;
  for (long long x : v)
    maxval = std::max(maxval, x);
  if (maxval > 65535)
    throw io_error("PGM values exceed the 16-bit format limit");

  std::ostringstream out;
  out << "P2\n" << width << " " << height << "\n" << maxval << "\n";
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x)
        out << ' ';
      out << v[std::size_t(y) * width + x];
    }
    out << '\n';
  }
  return out.str();
}

} // namespace

void atomic_write(const std::string &path, const std::string &content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw io_error("cannot open " + tmp + " for writing");
    out.write(content.data(), std::streamsize(content.size()));
    out.flush();
    if (!out)
      throw io_error("short write to " + tmp);
  }
  const int fd = ::open(tmp.c_str(), O_RDONLY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw io_error("cannot rename " + tmp + " to " + path + ": " + std::strerror(errno));
  }
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw io_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

MaskFile read_pbm(const std::string &path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string magic;
  in >> magic;
  if (magic != "P1")
    throw io_error(path + " is not a plain PBM (P1) file");

  MaskFile mf;
  mf.width = int(read_pnm_int(in, path));
  mf.height = int(read_pnm_int(in, path));
  if (mf.width <= 0 || mf.height <= 0)
    throw io_error(path + " has invalid dimensions");
  mf.mask.resize(std::size_t(mf.width) * mf.height);
  for (auto &cell : mf.mask) {
    // P1 pixels are single digits; whitespace between them is optional.
    skip_separators(in);
    const int c = in.get();
    if (c == '0')
      cell = 0;
    else if (c == '1')
      cell = 1;
    else
      throw io_error("malformed PBM pixel in " + path);
  }
  return mf;
}

std::string format_pbm(int width, int height, const std::vector<std::uint8_t> &mask) {
  if (mask.size() != std::size_t(width) * height)
    throw std::invalid_argument("mask shape mismatch");
  std::ostringstream out;
  out << "P1\n" << width << " " << height << "\n";
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x)
        out << ' ';
      out << (mask[std::size_t(y) * width + x] ? 1 : 0);
    }
    out << '\n';
  }
  return out.str();
}

std::string format_pgm(const RealImage &image) {
  std::vector<long long> v(image.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(image.values[i] >= 0.0))
      throw std::invalid_argument("PGM requires nonnegative values");
    v[i] = llround(image.values[i]);
  }
  return format_pgm_values(image.width, image.height, v);
}

std::string format_pgm(const CountImage &image) {
  for (long long c : image.counts)
    if (c < 0)
      throw std::invalid_argument("PGM requires nonnegative values");
  return format_pgm_values(image.width, image.height, image.counts);
}

GrayFile read_pgm(const std::string &path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5")
    throw io_error(path + " is not a PGM (P2/P5) file");

  GrayFile gf;
  gf.width = int(read_pnm_int(in, path));
  gf.height = int(read_pnm_int(in, path));
  gf.maxval = int(read_pnm_int(in, path));
  if (gf.width <= 0 || gf.height <= 0 || gf.maxval <= 0 || gf.maxval > 65535)
    throw io_error(path + " has an invalid PGM header");
  const std::size_t n = std::size_t(gf.width) * gf.height;
  gf.values.resize(n);

  if (magic == "P2") {
    for (auto &v : gf.values) {
      v = read_pnm_int(in, path);
      if (v < 0 || v > gf.maxval)
        throw io_error("PGM value out of range in " + path);
    }
    return gf;
  }

  in.get(); // single whitespace byte after the header
  const int bytes = gf.maxval > 255 ? 2 : 1;
  for (auto &v : gf.values) {
    int hi = in.get(), lo = bytes == 2 ? in.get() : 0;
    if (hi == EOF || (bytes == 2 && lo == EOF))
      throw io_error("truncated P5 data in " + path);
    v = bytes == 2 ? (hi << 8) | lo : hi;
    if (v > gf.maxval)
      throw io_error("PGM value out of range in " + path);
  }
  return gf;
}

std::string format_csv(const std::vector<std::string> &header,
                       const std::vector<std::vector<CsvCell>> &rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i)
      out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto &row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("CSV row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i)
        out << ',';
      out << (row[i].numeric ? format_number(row[i].number) : row[i].text);
    }
    out << '\n';
  }
  return out.str();
}

} // namespace gisec

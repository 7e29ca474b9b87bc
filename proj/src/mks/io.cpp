#include "mks/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "mks/errors.hpp"

namespace mks::io {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!out_) throw RuntimeFailure("cannot open " + path.string() + " for writing");
  }
  void magic(const char (&m)[5]) { out_.write(m, 4); }
  void u64(std::uint64_t v) { put(to_little(v)); }
  void f64(double v) { put(to_little(std::bit_cast<std::uint64_t>(v))); }
  void close() {
    out_.close();
    if (!out_) throw RuntimeFailure("write failed: " + path_.string());
  }

 private:
  template <class T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw RuntimeFailure("cannot open " + path.string());
  }
  void expect_magic(const char (&m)[5]) {
    char got[4];
    read(got, 4);
    if (std::memcmp(got, m, 4) != 0) throw RuntimeFailure(path_.string() + ": bad magic, expected " + m);
  }
  std::uint64_t u64() {
    std::uint64_t v;
    read(&v, sizeof v);
    return to_little(v);
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) throw RuntimeFailure(path_.string() + ": trailing bytes");
  }

 private:
  void read(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) throw RuntimeFailure(path_.string() + ": truncated file");
  }
  std::ifstream in_;
  std::filesystem::path path_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw RuntimeFailure("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text(path)); }

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

void write_trajectory(const std::filesystem::path& path, const TrajectoryFile& traj) {
  Writer w(path);
  w.magic("MKS1");
  w.u64(static_cast<std::uint64_t>(traj.n));
  w.f64(traj.dt);
  w.u64(traj.seed);
  w.u64(traj.snapshots.size());
  for (const Snapshot& s : traj.snapshots) w.f64(s.t);
  for (const Snapshot& s : traj.snapshots) {
    if (static_cast<std::int64_t>(s.positions.size()) != traj.n)
      throw std::invalid_argument("write_trajectory: snapshot size differs from N");
    for (const Vec2& p : s.positions) w.f64(p.x);
    for (const Vec2& p : s.positions) w.f64(p.y);
  }
  w.close();
}

TrajectoryFile read_trajectory(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic("MKS1");
  TrajectoryFile t;
  t.n = static_cast<std::int64_t>(r.u64());
  t.dt = r.f64();
  t.seed = r.u64();
  const std::uint64_t count = r.u64();
  const auto file_size = std::filesystem::file_size(path);
  if (count > file_size / 8 || (t.n > 0 && count * static_cast<std::uint64_t>(t.n) > file_size / 16))
    throw RuntimeFailure(path.string() + ": header inconsistent with file size");
  t.snapshots.resize(count);
  for (auto& s : t.snapshots) s.t = r.f64();
  for (auto& s : t.snapshots) {
    s.positions.resize(static_cast<std::size_t>(t.n));
    for (auto& p : s.positions) p.x = r.f64();
    for (auto& p : s.positions) p.y = r.f64();
  }
  r.expect_end();
  return t;
}

void write_trajectory_csv(const std::filesystem::path& path, std::span<const Snapshot> snapshots) {
  std::ostringstream out;
  out << "t,particle,x,y\n";
  for (const Snapshot& s : snapshots)
    for (std::size_t i = 0; i < s.positions.size(); ++i)
      out << format_double(s.t) << ',' << i << ',' << format_double(s.positions[i].x) << ','
          << format_double(s.positions[i].y) << '\n';
  write_text(path, out.str());
}

void write_field(const std::filesystem::path& path, const Field& field) {
  Writer w(path);
  w.magic("MKF1");
  w.f64(field.grid.half_extent);
  w.u64(static_cast<std::uint64_t>(field.grid.n));
  for (double v : field.values) w.f64(v);
  w.close();
}

Field read_field(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic("MKF1");
  GridSpec g;
  g.half_extent = r.f64();
  const std::uint64_t n = r.u64();
  if (n > (1u << 16)) throw RuntimeFailure(path.string() + ": grid size out of range");
  g.n = static_cast<int>(n);
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw RuntimeFailure(path.string() + ": " + e.what());
  }
  Field f(g);
  for (double& v : f.values) v = r.f64();
  r.expect_end();
  return f;
}

void write_field_csv(const std::filesystem::path& path, const Field& field) {
  std::ostringstream out;
  out << "x,y,value\n";
  for (int j = 0; j < field.grid.n; ++j)
    for (int k = 0; k < field.grid.n; ++k) {
      const Vec2 x = field.grid.node(j, k);
      out << format_double(x.x) << ',' << format_double(x.y) << ',' << format_double(field(j, k)) << '\n';
    }
  write_text(path, out.str());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw RuntimeFailure("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string junit_xml(std::string_view suite, std::span<const JUnitCase> cases) {
  std::size_t failures = 0;
  double total = 0.0;
  for (const auto& c : cases) {
    if (!c.passed) ++failures;
    total += c.seconds;
  }
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<testsuite name=\"" << xml_escape(suite) << "\" tests=\"" << cases.size() << "\" failures=\"" << failures
      << "\" errors=\"0\" time=\"" << format_double(total) << "\">\n";
  for (const auto& c : cases) {
    out << "  <testcase classname=\"" << xml_escape(c.classname) << "\" name=\"" << xml_escape(c.name)
        << "\" time=\"" << format_double(c.seconds) << "\"";
    if (c.passed && c.message.empty()) {
      out << "/>\n";
      continue;
    }
    out << ">\n";
    if (c.passed)
      out << "    <system-out>" << xml_escape(c.message) << "</system-out>\n";
    else
      out << "    <failure message=\"" << xml_escape(c.message) << "\"/>\n";
    out << "  </testcase>\n";
  }
  out << "</testsuite>\n";
  return out.str();
}

}  // namespace mks::io

#include "nnlci/io.hpp"

#include "nnlci/error.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nnlci {

void BinaryWriter::bytes(const void* p, std::size_t n) {
  os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void BinaryWriter::u32(std::uint32_t v) {
  std::array<unsigned char, 4> b{};
  for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  bytes(b.data(), b.size());
}

void BinaryWriter::i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }

void BinaryWriter::u64(std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  bytes(b.data(), b.size());
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::text(const std::string& s) {
  u64(s.size());
  bytes(s.data(), s.size());
}

void BinaryReader::bytes(void* p, std::size_t n) {
  is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is_.gcount()) != n) fail_("unexpected end of file");
}

std::uint32_t BinaryReader::u32() {
  std::array<unsigned char, 4> b{};
  bytes(b.data(), b.size());
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
  return v;
}

std::int32_t BinaryReader::i32() { return static_cast<std::int32_t>(u32()); }

std::uint64_t BinaryReader::u64() {
  std::array<unsigned char, 8> b{};
  bytes(b.data(), b.size());
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::text(std::uint64_t max_len) {
  const std::uint64_t n = u64();
  if (n > max_len) fail_("text block length out of range");
  std::string s(static_cast<std::size_t>(n), '\0');
  if (n > 0) bytes(s.data(), s.size());
  return s;
}

bool BinaryReader::at_end() { return is_.peek() == std::char_traits<char>::eof(); }

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_snapshot(const FieldSnapshot& f, const std::filesystem::path& path,
                    const std::map<std::string, std::string>& metadata) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  const GridSpec& g = f.grid;
  os << "# nnlci-field v1\n";
  os << "# dim=" << g.dim << "\n";
  os << "# x_lo=" << format_double(g.x_lo) << "\n# x_hi=" << format_double(g.x_hi) << "\n";
  os << "# y_lo=" << format_double(g.y_lo) << "\n# y_hi=" << format_double(g.y_hi) << "\n";
  os << "# nx=" << g.nx << "\n# ny=" << g.ny << "\n";
  os << "# dt=" << format_double(g.dt) << "\n";
  os << "# boundary=" << to_string(g.boundary) << "\n";
  os << "# time_index=" << f.time_index << "\n";
  for (const auto& [k, v] : metadata) os << "# " << k << "=" << v << "\n";
  os << "x y rho u v p\n";
  for (int j = 0; j < g.nodes_y(); ++j) {
    for (int i = 0; i < g.nodes_x(); ++i) {
      const PrimitiveState& s = f.at(i, j);
      os << format_double(g.x(i)) << ' ' << format_double(g.y(j)) << ' ' << format_double(s.rho)
         << ' ' << format_double(s.u) << ' ' << format_double(s.v) << ' ' << format_double(s.p)
         << '\n';
    }
  }
  if (!os) throw Error("failed writing " + path.string());
}

namespace {

double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error("malformed number '" + text + "' for " + what);
  }
  return v;
}

}  // namespace

SnapshotFile read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open snapshot file " + path.string());
  std::string line;
  std::getline(is, line);
  if (line != "# nnlci-field v1") throw Error(path.string() + " is not an nnlci field file");
  SnapshotFile out;
  std::map<std::string, std::string> kv;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) != 0) break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(2, eq - 2)] = line.substr(eq + 1);
  }
  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error("snapshot file misses '" + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  GridSpec g;
  g.dim = static_cast<int>(parse_number(take("dim"), "dim"));
  g.x_lo = parse_number(take("x_lo"), "x_lo");
  g.x_hi = parse_number(take("x_hi"), "x_hi");
  g.y_lo = parse_number(take("y_lo"), "y_lo");
  g.y_hi = parse_number(take("y_hi"), "y_hi");
  g.nx = static_cast<int>(parse_number(take("nx"), "nx"));
  g.ny = static_cast<int>(parse_number(take("ny"), "ny"));
  g.dt = parse_number(take("dt"), "dt");
  g.boundary = parse_boundary(take("boundary"));
  const int level = static_cast<int>(parse_number(take("time_index"), "time_index"));
  g.validate();
  out.metadata = std::move(kv);
  out.field = FieldSnapshot(g, level);
  for (int j = 0; j < g.nodes_y(); ++j) {
    for (int i = 0; i < g.nodes_x(); ++i) {
      if (!std::getline(is, line)) throw Error("snapshot file " + path.string() + " is truncated");
      std::istringstream row(line);
      std::string tok[6];
      for (auto& t : tok) row >> t;
      PrimitiveState& s = out.field.at(i, j);
      s.rho = parse_number(tok[2], "rho");
      s.u = parse_number(tok[3], "u");
      s.v = parse_number(tok[4], "v");
      s.p = parse_number(tok[5], "p");
    }
  }
  fill_ghosts(out.field);
  return out;
}

}  // namespace nnlci

#pragma once

#include "nnlci/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace nnlci {

/// Little-endian binary encoder used by the model and dataset formats.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& os) : os_(os) {}
  void bytes(const void* p, std::size_t n);
  void u32(std::uint32_t v);
  void i32(std::int32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void text(const std::string& s);  // u64 length + bytes

 private:
  std::ostream& os_;
};

/// Counterpart of BinaryWriter. Any short read throws the error type the
/// caller chose through `fail`.
class BinaryReader {
 public:
  using FailFn = void (*)(const std::string&);
  BinaryReader(std::istream& is, FailFn fail) : is_(is), fail_(fail) {}
  void bytes(void* p, std::size_t n);
  std::uint32_t u32();
  std::int32_t i32();
  std::uint64_t u64();
  double f64();
  std::string text(std::uint64_t max_len = 1u << 26);
  bool at_end();

 private:
  std::istream& is_;
  FailFn fail_;
};

/// Text snapshot file: a "# nnlci-field v1" header, key=value metadata
/// lines starting with '#', then one "x y rho u v p" row per node (x fastest),
/// written with round-trip precision.
void write_snapshot(const FieldSnapshot& f, const std::filesystem::path& path,
                    const std::map<std::string, std::string>& metadata = {});

struct SnapshotFile {
  FieldSnapshot field;
  std::map<std::string, std::string> metadata;
};

SnapshotFile read_snapshot(const std::filesystem::path& path);

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_escape(const std::string& s);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace nnlci

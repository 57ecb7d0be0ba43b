#include "erl2/serialize.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace erl2 {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

template <typename T>
void write_raw(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
  if (!os) throw std::runtime_error("checkpoint write failed");
}

template <typename T>
T read_raw(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint truncated or unreadable");
  return v;
}

}  // namespace

void write_u32(std::ostream& os, std::uint32_t v) { write_raw(os, v); }
void write_u64(std::ostream& os, std::uint64_t v) { write_raw(os, v); }
void write_f64(std::ostream& os, double v) { write_raw(os, v); }

void write_string(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!os) throw std::runtime_error("checkpoint write failed");
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  write_u32(os, static_cast<std::uint32_t>(m.rows()));
  write_u32(os, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) write_f64(os, m(i, j));
  }
}

void write_mlp(std::ostream& os, const MlpParams& p) {
  write_u32(os, static_cast<std::uint32_t>(p.layers.size()));
  for (const auto& layer : p.layers) {
    write_raw<std::uint8_t>(os, static_cast<std::uint8_t>(layer.activation));
    write_matrix(os, layer.weight);
    write_matrix(os, layer.bias);
  }
}

std::uint32_t read_u32(std::istream& is) { return read_raw<std::uint32_t>(is); }
std::uint64_t read_u64(std::istream& is) { return read_raw<std::uint64_t>(is); }
double read_f64(std::istream& is) { return read_raw<double>(is); }

std::string read_string(std::istream& is) {
  const std::uint32_t n = read_u32(is);
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw std::runtime_error("checkpoint truncated or unreadable");
  return s;
}

Eigen::MatrixXd read_matrix(std::istream& is) {
  const std::uint32_t rows = read_u32(is);
  const std::uint32_t cols = read_u32(is);
  if (static_cast<std::uint64_t>(rows) * cols > (1u << 28)) {
    throw std::runtime_error("checkpoint matrix header implausibly large");
  }
  Eigen::MatrixXd m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = read_f64(is);
  }
  return m;
}

MlpParams read_mlp(std::istream& is) {
  const std::uint32_t n = read_u32(is);
  if (n == 0 || n > 64) throw std::runtime_error("checkpoint mlp header corrupt");
  MlpParams p;
  p.layers.resize(n);
  for (auto& layer : p.layers) {
    const auto tag = read_raw<std::uint8_t>(is);
    if (tag > 2) throw std::runtime_error("checkpoint activation tag corrupt");
    layer.activation = static_cast<Activation>(tag);
    layer.weight = read_matrix(is);
    Eigen::MatrixXd b = read_matrix(is);
    if (b.cols() != 1) throw std::runtime_error("checkpoint bias shape corrupt");
    layer.bias = b.col(0);
  }
  p.check_consistent();
  return p;
}

void write_header(std::ostream& os) {
  os.write(kCheckpointMagic, 4);
  write_u32(os, kCheckpointVersion);
}

void read_header(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw std::runtime_error("not an ERL2 checkpoint (bad magic)");
  }
  const std::uint32_t version = read_u32(is);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
}

namespace {

std::uint64_t fnv1a_bytes(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::uint64_t checksum(const Eigen::MatrixXd& m) {
  return fnv1a_bytes(0xcbf29ce484222325ull, m.data(),
                     sizeof(double) * static_cast<std::size_t>(m.size()));
}

std::uint64_t checksum(const MlpParams& p) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& layer : p.layers) {
    h = fnv1a_bytes(h, layer.weight.data(), sizeof(double) * static_cast<std::size_t>(layer.weight.size()));
    h = fnv1a_bytes(h, layer.bias.data(), sizeof(double) * static_cast<std::size_t>(layer.bias.size()));
  }
  return h;
}

}  // namespace erl2

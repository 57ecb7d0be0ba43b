#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "erl2/mlp.hpp"

namespace erl2 {

// Flat binary checkpoint layout: magic "ERL2", then a version u32, then a
// sequence of sections. Matrices carry a (rows, cols) u32 header followed
// by row-major 64-bit little-endian floats. Round-trips are bit-exact.
inline constexpr char kCheckpointMagic[4] = {'E', 'R', 'L', '2'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v);
void write_u64(std::ostream& os, std::uint64_t v);
void write_f64(std::ostream& os, double v);
void write_string(std::ostream& os, const std::string& s);
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
void write_mlp(std::ostream& os, const MlpParams& p);

std::uint32_t read_u32(std::istream& is);
std::uint64_t read_u64(std::istream& is);
double read_f64(std::istream& is);
std::string read_string(std::istream& is);
Eigen::MatrixXd read_matrix(std::istream& is);
MlpParams read_mlp(std::istream& is);

void write_header(std::ostream& os);
void read_header(std::istream& is);  // throws on bad magic/version

// FNV-1a over the raw little-endian bytes; used by the gradient
// partitioning checks, which require exact (bitwise) comparisons.
std::uint64_t checksum(const Eigen::MatrixXd& m);
std::uint64_t checksum(const MlpParams& p);

}  // namespace erl2

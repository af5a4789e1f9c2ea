#pragma once

// Text checkpoints. Parameters are written as hexadecimal floating point,
// so a reload reproduces every bit.
//
//   ltlmarl-net 1
//   sizes 3 64 64 4
//   layer 0
//   <rows x cols weights, row-major, one row per line>
//   <bias entries on one line>
//   ...

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ltlmarl/error.hpp"
#include "ltlmarl/nn/dense.hpp"

namespace ltlmarl::nn {

inline constexpr int kCheckpointVersion = 1;

inline void write_network(std::ostream& out, const DenseNetwork& net) {
  out << "ltlmarl-net " << kCheckpointVersion << "\nsizes";
  for (int s : net.sizes()) out << ' ' << s;
  out << '\n' << std::hexfloat;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    const auto& l = net.layers()[i];
    out << "layer " << i << '\n';
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out << (c ? " " : "") << l.weight(r, c);
      out << '\n';
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out << (r ? " " : "") << l.bias(r);
    out << '\n';
  }
  out << std::defaultfloat;
}

namespace detail {

inline double read_real(std::istream& in) {
  std::string word;
  if (!(in >> word)) throw DataError("checkpoint: truncated parameters");
  char* end = nullptr;
  double v = std::strtod(word.c_str(), &end);
  if (end != word.c_str() + word.size()) throw DataError("checkpoint: bad number '" + word + "'");
  return v;
}

inline void expect_word(std::istream& in, const std::string& want) {
  std::string word;
  if (!(in >> word) || word != want) {
    throw DataError("checkpoint: expected '" + want + "', got '" + word + "'");
  }
}

}  // namespace detail

inline DenseNetwork read_network(std::istream& in) {
  detail::expect_word(in, "ltlmarl-net");
  int version = 0;
  if (!(in >> version) || version != kCheckpointVersion) {
    throw DataError("checkpoint: unsupported version");
  }
  detail::expect_word(in, "sizes");
  std::string line;
  std::getline(in, line);
  std::istringstream sizes_in(line);
  std::vector<int> sizes;
  for (int s; sizes_in >> s;) sizes.push_back(s);
  if (sizes.size() < 2) throw DataError("checkpoint: need at least two layer sizes");
  DenseNetwork net(sizes);
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    detail::expect_word(in, "layer");
    std::size_t idx = 0;
    if (!(in >> idx) || idx != i) throw DataError("checkpoint: layers out of order");
    auto& l = net.layers()[i];
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = detail::read_real(in);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = detail::read_real(in);
  }
  return net;
}

}  // namespace ltlmarl::nn

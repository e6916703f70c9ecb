#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "smartol/core.hpp"
#include "smartol/numeric.hpp"

namespace smartol {

struct BinarySequence {
  std::vector<std::uint8_t> bits;  // each 0 or 1
  std::size_t size() const { return bits.size(); }
};

// I.i.d. Bernoulli(p) bits from a seeded mt19937_64 through the fixed
// canonical_u01 mapping, so identical seeds reproduce identical sequences
// on every platform.
inline BinarySequence gen_bernoulli(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gen_bernoulli: p outside [0,1]");
  std::mt19937_64 rng(seed);
  BinarySequence seq;
  seq.bits.resize(n);
  for (std::size_t t = 0; t < n; ++t) seq.bits[t] = canonical_u01(rng()) < p ? 1 : 0;
  return seq;
}

// True unless the empirical mean strays more than 4 sigma from p.
inline bool bernoulli_mean_in_band(const BinarySequence& seq, double p) {
  if (seq.size() == 0) return true;
  double mean = 0.0;
  for (auto b : seq.bits) mean += b;
  mean /= static_cast<double>(seq.size());
  double band = 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(seq.size()));
  return std::abs(mean - p) <= band;
}

// c pairs "0,1" followed by n-2c ones; the worst-case family parameterized
// by the number of lead changes.
inline BinarySequence gen_lead_change(std::size_t n, std::size_t c) {
  if (2 * c > n) throw std::invalid_argument("gen_lead_change: need 2c <= n");
  BinarySequence seq;
  seq.bits.resize(n, 1);
  for (std::size_t i = 0; i < c; ++i) seq.bits[2 * i] = 0;
  return seq;
}

// m = 2 embedding: row t = (y_t, 1 - y_t). Expert 0 always predicts 0,
// expert 1 always predicts 1.
inline LossMatrix binary_to_losses(const BinarySequence& seq) {
  LossMatrix out(seq.size(), 2);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    double y = seq.bits[t] ? 1.0 : 0.0;
    out.set(t, 0, y);
    out.set(t, 1, 1.0 - y);
  }
  return out;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& token, std::size_t line_no) {
  const char* begin = token.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": cannot parse value '" + token + "'");
  return v;
}

}  // namespace detail

// CSV loss files: optional "# m=<int> n=<int>" header, then one round per
// line of m comma-separated decimals in [0,1]. Values are written with
// shortest round-trip formatting, so save/load is bit-exact.
inline void save_losses(const std::string& path, const LossMatrix& losses) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_losses: cannot open " + path);
  out << "# m=" << losses.experts() << " n=" << losses.rounds() << "\n";
  for (std::size_t t = 0; t < losses.rounds(); ++t) {
    auto row = losses.row(t);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << detail::format_double(row[j]);
    }
    out << "\n";
  }
}

inline LossMatrix load_losses(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_losses: cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  std::size_t header_m = 0, header_n = 0;
  bool have_header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (std::sscanf(line.c_str(), "# m=%zu n=%zu", &header_m, &header_n) == 2)
        have_header = true;
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string token = line.substr(start, comma == std::string::npos
                                                 ? std::string::npos
                                                 : comma - start);
      double v = detail::parse_double(token, line_no);
      if (!(v >= 0.0 && v <= 1.0))
        throw std::runtime_error("line " + std::to_string(line_no) + ": entry " +
                                 token + " out of range [0,1]");
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected " + std::to_string(rows.front().size()) +
                               " entries, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("load_losses: no data rows in " + path);
  if (have_header) {
    if (header_m != rows.front().size() || header_n != rows.size())
      throw std::runtime_error("load_losses: header (m=" + std::to_string(header_m) +
                               " n=" + std::to_string(header_n) +
                               ") does not match data (" +
                               std::to_string(rows.front().size()) + " x " +
                               std::to_string(rows.size()) + ")");
  }
  return LossMatrix::from_rows(rows);
}

// Binary sequence files: a single line of 0/1 characters.
inline void save_bits(const std::string& path, const BinarySequence& seq) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_bits: cannot open " + path);
  for (auto b : seq.bits) out << (b ? '1' : '0');
  out << "\n";
}

inline BinarySequence load_bits(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_bits: cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  BinarySequence seq;
  seq.bits.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] != '0' && line[i] != '1')
      throw std::runtime_error("load_bits: invalid character at position " +
                               std::to_string(i + 1));
    seq.bits.push_back(line[i] == '1' ? 1 : 0);
  }
  return seq;
}

}  // namespace smartol

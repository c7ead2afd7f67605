#include "cavityduo/spectrum_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cavityduo/error.hpp"

namespace cavityduo {

namespace {

constexpr const char* kHeader = "omega,D,re_alpha,im_alpha,re_beta,im_beta";

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

double parse_field(const std::string& text, std::size_t line, std::size_t column) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorKind::ParseError, "spectrum line " + std::to_string(line) + ", column " +
                                           std::to_string(column + 1) + ": not a number '" + t +
                                           "'");
  }
  return value;
}

}  // namespace

ReservoirSpectrum read_spectrum_csv(std::istream& in, double tau_c) {
  ReservoirSpectrum s;
  s.tau_c = tau_c;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "spectrum file is empty");
  ++line_no;
  if (trim(line) != kHeader) {
    throw Error(ErrorKind::ParseError,
                std::string("spectrum line 1: expected header '") + kHeader + "'");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::array<double, 6> v{};
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= v.size()) {
        throw Error(ErrorKind::ParseError,
                    "spectrum line " + std::to_string(line_no) + ": more than 6 columns");
      }
      v[col] = parse_field(cell, line_no, col);
      ++col;
    }
    if (col != v.size()) {
      throw Error(ErrorKind::ParseError,
                  "spectrum line " + std::to_string(line_no) + ": expected 6 columns");
    }
    if (!s.grid.empty() && !(v[0] > s.grid.back())) {
      throw Error(ErrorKind::ParseError,
                  "spectrum line " + std::to_string(line_no) + ": omega not strictly increasing");
    }
    s.grid.push_back(v[0]);
    s.density.push_back(v[1]);
    s.alpha.emplace_back(v[2], v[3]);
    s.beta.emplace_back(v[4], v[5]);
  }
  return s;
}

ReservoirSpectrum read_spectrum_csv(const std::string& path, double tau_c) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open spectrum file '" + path + "'");
  return read_spectrum_csv(in, tau_c);
}

void write_spectrum_csv(std::ostream& out, const ReservoirSpectrum& s) {
  out << kHeader << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    out << s.grid[i] << ',' << s.density[i] << ',' << s.alpha[i].real() << ','
        << s.alpha[i].imag() << ',' << s.beta[i].real() << ',' << s.beta[i].imag() << '\n';
  }
}

}  // namespace cavityduo

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qchan/family.hpp"

namespace qchan {

using Json = nlohmann::json;

/// Shared wire format for matrices: row-major real and imaginary parts.
inline Json matrix_to_json(const Mat& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index jj = 0; jj < m.cols(); ++jj) {
      re.push_back(m(i, jj).real());
      im.push_back(m(i, jj).imag());
    }
  j["re"] = re;
  j["im"] = im;
  return j;
}

inline Mat matrix_from_json(const Json& j) {
  Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  if (rows < 1 || cols < 1) throw std::invalid_argument("matrix json: bad dimensions");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != rows * cols ||
      static_cast<Eigen::Index>(im.size()) != rows * cols)
    throw std::invalid_argument("matrix json: entry count mismatch");
  Mat m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index jj = 0; jj < cols; ++jj, ++k)
      m(i, jj) = Cplx(re[k].get<double>(), im[k].get<double>());
  return m;
}

inline Json channel_to_json(const Channel& c) {
  return Json{{"d_in", c.d_in}, {"d_out", c.d_out}, {"choi", matrix_to_json(c.choi)}};
}

inline Channel channel_from_json(const Json& j) {
  Channel c;
  c.d_in = j.at("d_in").get<Eigen::Index>();
  c.d_out = j.at("d_out").get<Eigen::Index>();
  c.choi = matrix_from_json(j.at("choi"));
  validate_channel(c);
  return c;
}

/// Numbers in CSV output carry 12 significant digits, '.' decimal point.
inline std::string csv_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

struct SpecParseError : std::runtime_error {
  int line;
  SpecParseError(int ln, const std::string& msg)
      : std::runtime_error("line " + std::to_string(ln) + ": " + msg), line(ln) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::pair<double, double>> parse_box(const std::string& text, int line) {
  // expected form: [[a,b],[c,d],...]
  std::vector<std::pair<double, double>> box;
  std::vector<double> nums;
  std::string cur;
  for (char ch : text) {
    if ((ch >= '0' && ch <= '9') || ch == '.' || ch == '-' || ch == '+' || ch == 'e' ||
        ch == 'E') {
      cur += ch;
    } else {
      if (!cur.empty()) {
        try {
          nums.push_back(std::stod(cur));
        } catch (...) {
          throw SpecParseError(line, "bad number in box: " + cur);
        }
        cur.clear();
      }
      if (ch != '[' && ch != ']' && ch != ',' && ch != ' ' && ch != '\t')
        throw SpecParseError(line, std::string("unexpected character in box: ") + ch);
    }
  }
  if (!cur.empty()) {
    try {
      nums.push_back(std::stod(cur));
    } catch (...) {
      throw SpecParseError(line, "bad number in box: " + cur);
    }
  }
  if (nums.empty() || nums.size() % 2 != 0)
    throw SpecParseError(line, "box must list interval pairs [[a,b],...]");
  for (std::size_t i = 0; i < nums.size(); i += 2) {
    if (!(nums[i] < nums[i + 1]))
      throw SpecParseError(line, "box interval must satisfy a < b");
    box.emplace_back(nums[i], nums[i + 1]);
  }
  return box;
}

}  // namespace detail

/// Parses a key-value family spec:
///   family = bitflip | pauli | depolarizing | rotation | constant_pure
///   box    = [[a,b],...]
/// Unknown keys and malformed lines raise SpecParseError with the line number.
inline ChannelFamily parse_family_spec(std::istream& in) {
  std::string family_name;
  std::vector<std::pair<double, double>> box;
  std::string line;
  int ln = 0;
  int family_line = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::string s = detail::trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw SpecParseError(ln, "expected key = value");
    std::string key = detail::trim(s.substr(0, eq));
    std::string value = detail::trim(s.substr(eq + 1));
    if (key == "family") {
      family_name = value;
      family_line = ln;
    } else if (key == "box") {
      box = detail::parse_box(value, ln);
    } else {
      throw SpecParseError(ln, "unknown key: " + key);
    }
  }
  if (family_name.empty()) throw SpecParseError(ln == 0 ? 1 : ln, "missing 'family' key");
  auto need_box = [&](std::size_t axes) {
    if (box.empty()) return;  // defaults apply
    if (box.size() != axes)
      throw SpecParseError(family_line, "box has wrong number of axes for " + family_name);
  };
  if (family_name == "bitflip") {
    need_box(1);
    return box.empty() ? bitflip_family() : bitflip_family(box[0]);
  }
  if (family_name == "pauli") {
    if (box.empty()) return pauli3_family();
    if (box.size() == 3) return pauli3_family(box);
    if (box.size() == 1)
      return pauli_family(
          [](const RealVec& t) { return PauliProbs{1.0 - t[0], t[0], 0.0, 0.0}; }, box,
          "pauli");
    if (box.size() == 2)
      return pauli_family(
          [](const RealVec& t) { return PauliProbs{1.0 - t[0] - t[1], t[0], t[1], 0.0}; },
          box, "pauli");
    throw SpecParseError(family_line, "pauli family supports at most 3 parameters");
  }
  if (family_name == "depolarizing") {
    need_box(1);
    return box.empty() ? depolarizing_family() : depolarizing_family(box[0]);
  }
  if (family_name == "rotation") {
    need_box(1);
    return box.empty() ? rotation_family() : rotation_family(box[0]);
  }
  if (family_name == "constant_pure") {
    need_box(1);
    return box.empty() ? constant_pure_family() : constant_pure_family(box[0]);
  }
  throw SpecParseError(family_line, "unknown family: " + family_name);
}

inline ChannelFamily load_family_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open family spec: " + path);
  return parse_family_spec(in);
}

}  // namespace qchan

#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "complex_mobius.hpp"
#include "errors.hpp"
#include "geometry.hpp"

namespace kleinian {

/// Shortest text that reads back to the same double.
inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_double(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "not a number: '" + text + "'");
  }
  if (used != t.size()) throw Error(ErrorCode::InvalidArgument, "not a number: '" + text + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) out.push_back(parse_double(item));
  return out;
}

/// "x,y,z".
inline Point3 parse_point(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 3) throw Error(ErrorCode::InvalidArgument, "expected x,y,z but got '" + text + "'");
  return Point3(v[0], v[1], v[2]);
}

/// Complex literals "a", "bi", "a+bi", "a-bi", "i", "-i".
inline Complex parse_complex(const std::string& text) {
  std::string t = trim(text);
  if (t.empty()) throw Error(ErrorCode::InvalidArgument, "empty complex literal");
  if (t.back() != 'i') return {parse_double(t), 0.0};
  t.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_double(s);
  };
  if (split == std::string::npos) return {0.0, imag_of(t)};
  return {parse_double(t.substr(0, split)), imag_of(t.substr(split))};
}

inline std::string format_complex(Complex z) {
  std::ostringstream os;
  os.precision(15);
  os << z.real() << (z.imag() < 0 || std::signbit(z.imag()) ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

/// Flat "key = value" configuration; '#' starts a comment.
class Config {
 public:
  static Config parse(std::istream& in) {
    Config c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      if (key.empty())
        throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(lineno) + ": empty key");
      c.values_[key] = trim(line.substr(eq + 1));
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open config '" + path + "'");
    return parse(in);
  }

  static Config from_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  const std::string& get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorCode::InvalidArgument, "missing key '" + key + "'");
    return it->second;
  }
  std::string get_or(const std::string& key, const std::string& def) const {
    return has(key) ? get(key) : def;
  }
  double number(const std::string& key) const { return parse_double(get(key)); }
  double number_or(const std::string& key, double def) const { return has(key) ? number(key) : def; }
  Point3 point(const std::string& key) const { return parse_point(get(key)); }
  Complex complex(const std::string& key) const { return parse_complex(get(key)); }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Map from config keys under `prefix`: type = affine|inversive, lambda, P (nine entries, row
/// major), u, and v for inversive maps. P defaults to the identity or to diag(1,-1,1).
inline MobiusR3 map_from_config(const Config& c, const std::string& prefix = "") {
  const std::string type = c.get_or(prefix + "type", "inversive");
  const double lambda = c.number_or(prefix + "lambda", 1.0);
  Matrix3 P = type == "affine" ? Matrix3::Identity() : OrthMatrix3::reflect_y().matrix();
  if (c.has(prefix + "P")) {
    const auto v = parse_list(c.get(prefix + "P"));
    if (v.size() != 9) throw Error(ErrorCode::InvalidArgument, prefix + "P needs nine entries");
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) P(r, k) = v[static_cast<std::size_t>(3 * r + k)];
  }
  const Point3 u = c.has(prefix + "u") ? c.point(prefix + "u") : Point3(Point3::Zero());
  if (type == "affine") return Affine{lambda, OrthMatrix3(P), u};
  if (type == "inversive") {
    const Point3 v = c.has(prefix + "v") ? c.point(prefix + "v") : Point3(Point3::Zero());
    return Inversive{lambda, OrthMatrix3(P), u, v};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown map type '" + type + "'");
}

/// Text form of a map in normal form.
inline std::string describe(const MobiusR3& f) {
  std::ostringstream os;
  os.precision(15);
  auto vec = [&](const Point3& p) { os << p.x() << "," << p.y() << "," << p.z(); };
  const Matrix3& P = f.P().matrix();
  os << "type: " << (f.is_affine() ? "affine" : "inversive") << "\n";
  os << "lambda: " << f.lambda() << "\n";
  os << "P:";
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) os << (r == 0 && k == 0 ? " " : ",") << P(r, k);
  os << "\n";
  if (f.is_affine()) {
    os << "u: ";
    vec(f.affine().u);
    os << "\n";
  } else {
    os << "u: ";
    vec(f.inversive().u);
    os << "\nv: ";
    vec(f.inversive().v);
    os << "\n";
  }
  return os.str();
}

// ---- binary and text writers ----

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path + "' failed");
}

/// Binary PPM (P6, maxval 255) from interleaved RGB bytes.
inline std::string encode_ppm(int width, int height, const std::vector<std::uint8_t>& rgb) {
  if (width < 1 || height < 1 || rgb.size() != static_cast<std::size_t>(width) * height * 3)
    throw Error(ErrorCode::InvalidArgument, "RGB buffer does not match image size");
  std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
  return out;
}

/// Binary PGM (P5, maxval 255).
inline std::string encode_pgm(int width, int height, const std::vector<std::uint8_t>& gray) {
  if (width < 1 || height < 1 || gray.size() != static_cast<std::size_t>(width) * height)
    throw Error(ErrorCode::InvalidArgument, "gray buffer does not match image size");
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(gray.data()), gray.size());
  return out;
}

inline std::vector<std::uint8_t> gray_to_rgb(const std::vector<std::uint8_t>& gray) {
  std::vector<std::uint8_t> rgb(gray.size() * 3);
  for (std::size_t k = 0; k < gray.size(); ++k) rgb[3 * k] = rgb[3 * k + 1] = rgb[3 * k + 2] = gray[k];
  return rgb;
}

}  // namespace kleinian

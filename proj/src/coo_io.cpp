#include "hlsm/errors.hpp"
#include "hlsm/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace hlsm {

namespace {

/// Orbit representative with sorted indices (i ≤ j, or i ≤ j ≤ k).
Index3 representative(const Index3& x, Symmetry sym) {
  if (sym == Symmetry::sym12) return {std::min(x.i, x.j), std::max(x.i, x.j), x.k};
  if (sym == Symmetry::symfull) {
    std::array<std::size_t, 3> p{x.i, x.j, x.k};
    std::sort(p.begin(), p.end());
    return {p[0], p[1], p[2]};
  }
  return x;
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

CooFile read_coo(std::istream& in) {
  CooFile out;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::set<Index3> seen;
  Dims dims{};
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = strip_comment(line);
    if (blank(body)) continue;
    std::istringstream fields(body);
    if (!have_header) {
      std::string magic, tag;
      if (!(fields >> magic >> dims[0] >> dims[1] >> dims[2] >> tag) || magic != "TENSOR3") {
        fail(line_no, "expected header 'TENSOR3 n1 n2 n3 <none|sym12|symfull>'");
      }
      std::string extra;
      if (fields >> extra) fail(line_no, "trailing text after header");
      if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0) fail(line_no, "dimensions must be positive");
      try {
        out.symmetry = parse_symmetry(tag);
      } catch (const DataError& e) {
        fail(line_no, e.what());
      }
      if (out.symmetry != Symmetry::none && dims[0] != dims[1]) fail(line_no, "symmetric tensor needs n1 == n2");
      if (out.symmetry == Symmetry::symfull && dims[1] != dims[2]) fail(line_no, "symfull tensor needs n1 == n2 == n3");
      out.tensor = Tensor3(dims);
      have_header = true;
      continue;
    }
    long long i = 0, j = 0, k = 0;
    double v = 0.0;
    std::string extra;
    if (!(fields >> i >> j >> k >> v) || (fields >> extra)) fail(line_no, "expected 'i j k v'");
    if (i < 1 || j < 1 || k < 1 || static_cast<std::size_t>(i) > dims[0] ||
        static_cast<std::size_t>(j) > dims[1] || static_cast<std::size_t>(k) > dims[2]) {
      fail(line_no, "index out of range");
    }
    if (v != 0.0 && v != 1.0) fail(line_no, "value must be 0 or 1");
    const Index3 x{static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), static_cast<std::size_t>(k - 1)};
    if (!seen.insert(representative(x, out.symmetry)).second) fail(line_no, "duplicate entry");
    for (const auto& y : symmetry_orbit(x, out.symmetry)) out.tensor(y.i, y.j, y.k) = v;
  }
  if (!have_header) throw DataError("empty tensor file (no header)");
  return out;
}

CooFile read_coo(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return read_coo(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_coo(std::ostream& out, const Tensor3& t, Symmetry sym) {
  const Dims& d = t.dims();
  if (sym != Symmetry::none && d[0] != d[1]) throw DimensionError("write_coo: symmetric tensor needs n1 == n2");
  if (sym == Symmetry::symfull && d[1] != d[2]) throw DimensionError("write_coo: symfull tensor needs a cube");
  out << "TENSOR3 " << d[0] << ' ' << d[1] << ' ' << d[2] << ' ' << symmetry_name(sym) << '\n';
  for (std::size_t i = 0; i < d[0]; ++i)
    for (std::size_t j = 0; j < d[1]; ++j)
      for (std::size_t k = 0; k < d[2]; ++k) {
        const double v = t(i, j, k);
        if (v != 0.0 && v != 1.0) throw DataError("write_coo: tensor is not binary");
        const Index3 x{i, j, k};
        for (const auto& y : symmetry_orbit(x, sym)) {
          if (t(y.i, y.j, y.k) != v) throw DataError("write_coo: tensor is not " + symmetry_name(sym) + "-symmetric");
        }
        if (v == 1.0 && representative(x, sym) == x) out << i + 1 << ' ' << j + 1 << ' ' << k + 1 << " 1\n";
      }
}

void write_coo(const std::string& path, const Tensor3& t, Symmetry sym) {
  std::ostringstream buf;
  write_coo(buf, t, sym);
  write_text_file(path, buf.str());
}

}  // namespace hlsm

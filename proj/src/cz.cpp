#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "hdtk/decomp.hpp"

namespace hdtk {

double DyadicCube::side() const { return std::ldexp(1.0, -level); }

double DyadicCube::measure(int dim) const { return std::pow(side(), dim); }

bool DyadicCube::contains_cell(const Index3& cell, int n) const {
  if (level < 0) return true;
  const int width = n >> level;
  if (width < 1) return false;
  for (int i = 0; i < 3; ++i)
    if (cell[i] / width != origin[i]) return false;
  return true;
}

namespace {

struct Stopping {
  const GridFunction& f;
  double s;
  int dim;
  int n;
  int max_level;
  std::vector<double> good;
  std::vector<CZPiece> pieces;

  template <class Fn>
  void for_cells(int level, const Index3& origin, Fn fn) const {
    const int w = n >> level;
    Index3 lo{0, 0, 0}, hi{1, 1, 1};
    for (int i = 0; i < dim; ++i) {
      lo[i] = origin[i] * w;
      hi[i] = lo[i] + w;
    }
    for (int a = lo[0]; a < hi[0]; ++a)
      for (int b = lo[1]; b < hi[1]; ++b)
        for (int c = lo[2]; c < hi[2]; ++c) {
          std::size_t flat = static_cast<std::size_t>(a);
          if (dim > 1) flat = flat * n + b;
          if (dim > 2) flat = flat * n + c;
          fn(flat);
        }
  }

  double mean_abs(int level, const Index3& origin) const {
    double sum = 0.0;
    std::size_t count = 0;
    for_cells(level, origin, [&](std::size_t flat) {
      sum += std::abs(f[flat].real());
      ++count;
    });
    return sum / static_cast<double>(count);
  }

  void select(int level, const Index3& origin) {
    double sum = 0.0;
    std::size_t count = 0;
    for_cells(level, origin, [&](std::size_t flat) {
      sum += f[flat].real();
      ++count;
    });
    const double m = sum / static_cast<double>(count);
    std::vector<Complex> part(f.size());
    for_cells(level, origin, [&](std::size_t flat) {
      part[flat] = f[flat].real() - m;
      good[flat] = m;
    });
    pieces.push_back({DyadicCube{level, origin}, GridFunction(dim, n, std::move(part)), 0.0});
  }

  // Precondition: the mean of |f| over this cube is at most s.
  void descend(int level, const Index3& origin) {
    if (level == max_level) return;
    const int children = 1 << dim;
    for (int c = 0; c < children; ++c) {
      Index3 child{0, 0, 0};
      for (int i = 0; i < dim; ++i) child[i] = 2 * origin[i] + ((c >> (dim - 1 - i)) & 1);
      if (mean_abs(level + 1, child) > s)
        select(level + 1, child);
      else
        descend(level + 1, child);
    }
  }
};

}  // namespace

CZDecomposition cz_decompose(const GridFunction& f, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("cz_decompose: level s must be positive");
  if (!f.is_real()) throw std::invalid_argument("cz_decompose: f must be real-valued");
  const int dim = f.dim();
  const int n = f.resolution();
  Stopping st{f, s, dim, n, std::countr_zero(static_cast<unsigned>(n)), {}, {}};
  st.good.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) st.good[i] = f[i].real();

  CZDecomposition out{GridFunction::zeros(dim, n), 0.0, {}, s};
  const double top = st.mean_abs(0, {0, 0, 0});
  if (top <= s) {
    st.descend(0, {0, 0, 0});
  } else {
    // f is extended by zero off [0,1)^d; climb the ancestors [0, 2^K)^d until
    // the average drops to s and select the child just below it.
    int k = 1;
    while (top * std::ldexp(1.0, -k * dim) > s) ++k;
    const DyadicCube cube{-(k - 1), {0, 0, 0}};
    const double measure = cube.measure(dim);
    double sum = 0.0;
    for (const auto& v : f.values()) sum += v.real();
    const double m = sum / static_cast<double>(f.size()) / measure;
    std::vector<Complex> part(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      part[i] = f[i].real() - m;
      st.good[i] = m;
    }
    st.pieces.push_back({cube, GridFunction(dim, n, std::move(part)), k > 1 ? -m : 0.0});
    out.good_exterior = k > 1 ? m : 0.0;
  }
  std::vector<Complex> good(st.good.begin(), st.good.end());
  out.good = GridFunction(dim, n, std::move(good));
  out.pieces = std::move(st.pieces);
  return out;
}

CZCheck check_cz(const GridFunction& f, const CZDecomposition& dec) {
  const int dim = f.dim();
  const int n = f.resolution();
  const double inv = 1.0 / static_cast<double>(f.size());
  CZCheck out;

  std::vector<Complex> rest(f.values().begin(), f.values().end());
  std::vector<int> cover(f.size(), 0);
  double exterior_rest = dec.good_exterior;
  double exterior_measure = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    rest[i] -= dec.good[i];
    out.l1_f += std::abs(f[i]) * inv;
    out.l1_total += std::abs(dec.good[i]) * inv;
    out.linf_good = std::max(out.linf_good, std::abs(dec.good[i]));
  }
  for (const auto& piece : dec.pieces) {
    const double measure = piece.cube.measure(dim);
    const double outside = piece.cube.level < 0 ? measure - 1.0 : 0.0;
    if (piece.cube.level < 0) exterior_measure = std::max(exterior_measure, outside);
    Complex integral = piece.exterior_value * outside;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Complex v = piece.part[i];
      rest[i] -= v;
      integral += v * inv;
      out.l1_total += std::abs(v) * inv;
      const bool inside = piece.cube.contains_cell(piece.part.multi_index(i), n);
      if (inside) ++cover[i];
      if (!inside && v != Complex{}) out.supports_ok = false;
    }
    exterior_rest += piece.exterior_value;
    out.l1_total += std::abs(piece.exterior_value) * outside;
    out.max_piece_mean = std::max(out.max_piece_mean, std::abs(integral));
    out.total_measure += measure;
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    out.reconstruction_error = std::max(out.reconstruction_error, std::abs(rest[i]));
    if (cover[i] > 1) out.cubes_disjoint = false;
  }
  if (exterior_measure > 0.0) {
    out.reconstruction_error = std::max(out.reconstruction_error, std::abs(exterior_rest));
    out.l1_total += std::abs(dec.good_exterior) * exterior_measure;
    out.linf_good = std::max(out.linf_good, std::abs(dec.good_exterior));
  }
  return out;
}

}  // namespace hdtk

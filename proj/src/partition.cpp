#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hdtk/decomp.hpp"
#include "sampling.hpp"

namespace hdtk {
namespace detail {

std::vector<Vec> sample_directions(int dim, int count) {
  std::vector<Vec> out;
  if (dim == 1) {
    out.push_back({1.0, 0.0, 0.0});
    out.push_back({-1.0, 0.0, 0.0});
  } else if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * (k + 0.5) / count;
      out.push_back({std::cos(a), std::sin(a), 0.0});
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double rho = std::sqrt(1.0 - z * z);
      out.push_back({rho * std::cos(golden * k), rho * std::sin(golden * k), z});
    }
  }
  return out;
}

Vec scaled(const Vec& v, double s) { return {v[0] * s, v[1] * s, v[2] * s}; }

Complex shift_factor(double phase) {
  // exp(-i a) - 1 = -2 i sin(a/2) exp(-i a/2)
  const double half = 0.5 * phase;
  return Complex{0.0, -2.0 * std::sin(half)} * std::polar(1.0, -half);
}

}  // namespace detail

namespace {

Vec ldexp_vec(const Vec& v, int e) {
  return {std::ldexp(v[0], e), std::ldexp(v[1], e), std::ldexp(v[2], e)};
}

}  // namespace

RdSymbol constant_symbol(int dim, Complex value) {
  return RdSymbol{dim, [value](const Vec&) { return value; }, std::abs(value), std::nullopt};
}

double default_seed(const Vec& xi, int dim) {
  const double r = norm(xi, dim);
  if (r <= 0.0) return 0.0;
  const double t = std::log2(r);
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

DyadicPartition::DyadicPartition(int dim, std::function<double(const Vec&)> seed, int j_min,
                                 int j_max)
    : dim_(dim), seed_(std::move(seed)), j_min_(j_min), j_max_(j_max) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("partition: dimension must be 1, 2 or 3");
  if (j_min > j_max) throw std::invalid_argument("partition: j_min > j_max");
}

double DyadicPartition::theta(const Vec& xi) const {
  const double r = norm(xi, dim_);
  if (r == 0.0) return 0.0;
  const double top = seed_(xi);
  if (top == 0.0) return 0.0;
  // Theta(2^-i xi) can only be nonzero for i in [e-1, e+2], e = floor(log2 r).
  const int e = std::ilogb(r);
  double denom = 0.0;
  for (int i = e - 2; i <= e + 3; ++i) denom += seed_(ldexp_vec(xi, -i));
  return top / denom;
}

double DyadicPartition::scaled_theta(int j, const Vec& xi) const {
  return theta(ldexp_vec(xi, -j));
}

double DyadicPartition::partial_sum(const Vec& xi) const {
  const double r = norm(xi, dim_);
  if (r == 0.0) return 0.0;
  const int e = std::ilogb(r);
  double s = 0.0;
  for (int j = std::max(j_min_, e - 2); j <= std::min(j_max_, e + 3); ++j) s += scaled_theta(j, xi);
  return s;
}

DyadicPartition build_partition(int dim, std::function<double(const Vec&)> seed, int j_min,
                                int j_max) {
  if (!seed) throw std::invalid_argument("partition: empty seed");
  const auto dirs = detail::sample_directions(dim, 64);
  constexpr int radial = 400;
  for (const auto& u : dirs) {
    for (int k = 0; k <= radial; ++k) {
      // log-spaced radii over [1/8, 8]
      const double t = -3.0 + 6.0 * k / radial;
      const double r = std::exp2(t);
      const Vec xi = detail::scaled(u, r);
      const double v = seed(xi);
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("partition: seed is negative or non-finite at |xi| = " +
                                    std::to_string(r));
      if ((r < 0.5 || r > 2.0) && v != 0.0)
        throw std::invalid_argument("partition: seed does not vanish outside 1/2 <= |xi| <= 2 (|xi| = " +
                                    std::to_string(r) + ")");
      if (std::abs(t) <= 0.5 && !(v > 0.0))
        throw std::invalid_argument("partition: seed vanishes inside 2^-1/2 <= |xi| <= 2^1/2 (|xi| = " +
                                    std::to_string(r) + ")");
    }
  }
  return DyadicPartition(dim, std::move(seed), j_min, j_max);
}

DyadicPartition build_partition(int dim, int j_min, int j_max) {
  return build_partition(dim, [dim](const Vec& xi) { return default_seed(xi, dim); }, j_min,
                         j_max);
}

RdSymbol dyadic_piece(const RdSymbol& phi, int j, const DyadicPartition& partition) {
  if (phi.dim != partition.dim()) throw std::invalid_argument("dyadic_piece: dimension mismatch");
  RdSymbol out;
  out.dim = phi.dim;
  out.sup_norm = phi.sup_norm;
  out.support_annulus = std::make_pair(std::ldexp(1.0, j - 1), std::ldexp(1.0, j + 1));
  out.evaluator = [phi, j, partition](const Vec& xi) -> Complex {
    const double w = partition.scaled_theta(j, xi);
    if (w == 0.0) return 0.0;
    return phi(xi) * w;
  };
  return out;
}

RdSymbol psi_n_symbol(const RdSymbol& phi, int n, const DyadicPartition& partition) {
  if (phi.dim != partition.dim()) throw std::invalid_argument("psi_n_symbol: dimension mismatch");
  if (n < 0) throw std::invalid_argument("psi_n_symbol: N must be nonnegative");
  RdSymbol out;
  out.dim = phi.dim;
  // sum_j theta(2^-j xi) <= 1, so the partial sum never exceeds |phi|.
  out.sup_norm = phi.sup_norm;
  out.support_annulus = std::make_pair(std::ldexp(1.0, -n - 1), std::ldexp(1.0, n + 1));
  out.evaluator = [phi, n, partition](const Vec& xi) -> Complex {
    const double r = norm(xi, phi.dim);
    if (r == 0.0) return 0.0;
    const int e = std::ilogb(r);
    double w = 0.0;
    for (int j = std::max(-n, e - 2); j <= std::min(n, e + 3); ++j)
      w += partition.scaled_theta(j, xi);
    if (w == 0.0) return 0.0;
    return phi(xi) * w;
  };
  return out;
}

}  // namespace hdtk

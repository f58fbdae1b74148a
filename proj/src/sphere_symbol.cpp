#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hdtk/multiplier.hpp"

namespace hdtk {
namespace {

int default_kappa(int dim) { return dim / 2 + 1; }

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("sphere symbol: dimension must be 1, 2 or 3");
}

Complex eval_trig(const SphereSymbol::TrigTable& table, const Vec& e) {
  // exp(i m angle) = z^m with z = e_1 + i e_2 on the unit circle
  const Complex z{e[0], e[1]};
  Complex acc{};
  for (const auto& [m, c] : table) {
    Complex w{1.0, 0.0};
    const Complex base = m >= 0 ? z : std::conj(z);
    for (int k = 0; k < std::abs(m); ++k) w *= base;
    acc += c * w;
  }
  return acc;
}

SphereSymbol::TrigTable convolve(const SphereSymbol::TrigTable& a, const SphereSymbol::TrigTable& b) {
  SphereSymbol::TrigTable out;
  for (const auto& [m, c] : a)
    for (const auto& [k, d] : b) out[m + k] += c * d;
  return out;
}

SphereSymbol::TrigTable coordinate_table(int axis) {
  if (axis == 0) return {{-1, Complex{0.5, 0.0}}, {1, Complex{0.5, 0.0}}};
  return {{-1, Complex{0.0, 0.5}}, {1, Complex{0.0, -0.5}}};
}

}  // namespace

SphereSymbol::SphereSymbol(int dim, int kappa, Rep rep, double c_kappa)
    : dim_(dim), kappa_(kappa), rep_(std::move(rep)), c_kappa_(c_kappa) {
  if (!std::isfinite(c_kappa_)) throw std::invalid_argument("sphere symbol: c_kappa norm must be finite");
}

double SphereSymbol::trig_c_kappa(const TrigTable& table, int kappa) {
  constexpr int samples = 4096;
  double total = 0.0;
  for (int k = 0; k <= kappa; ++k) {
    double sup = 0.0;
    for (int s = 0; s < samples; ++s) {
      const double a = 2.0 * std::numbers::pi * s / samples;
      Complex acc{};
      for (const auto& [m, c] : table)
        acc += c * std::pow(Complex{0.0, static_cast<double>(m)}, k) * std::polar(1.0, m * a);
      sup = std::max(sup, std::abs(acc));
    }
    total += sup;
  }
  return total;
}

SphereSymbol SphereSymbol::constant(int dim, Complex value) {
  check_dim(dim);
  if (dim == 1) return poles(value, value);
  if (dim == 2) return trig_polynomial({{0, value}});
  return general(dim, [value](const Vec&) { return value; }, std::abs(value));
}

SphereSymbol SphereSymbol::poles(Complex plus, Complex minus) {
  return SphereSymbol(1, default_kappa(1), Poles{plus, minus}, std::max(std::abs(plus), std::abs(minus)));
}

SphereSymbol SphereSymbol::trig_polynomial(TrigTable coefficients) {
  const double c = trig_c_kappa(coefficients, default_kappa(2));
  return SphereSymbol(2, default_kappa(2), std::move(coefficients), c);
}

SphereSymbol SphereSymbol::general(int dim, std::function<Complex(const Vec&)> eval,
                                   double c_kappa_norm, int kappa) {
  check_dim(dim);
  if (!eval) throw std::invalid_argument("sphere symbol: empty evaluator");
  if (c_kappa_norm < 0.0) throw std::invalid_argument("sphere symbol: negative norm");
  return SphereSymbol(dim, kappa < 0 ? default_kappa(dim) : kappa, General{std::move(eval)},
                      c_kappa_norm);
}

SphereSymbol SphereSymbol::coordinate(int dim, int axis) {
  check_dim(dim);
  if (axis < 0 || axis >= dim) throw std::invalid_argument("sphere symbol: bad axis");
  if (dim == 1) return poles(1.0, -1.0);
  if (dim == 2) return trig_polynomial(coordinate_table(axis));
  const int kappa = default_kappa(dim);
  return general(dim, [axis](const Vec& e) { return Complex{e[axis], 0.0}; }, kappa + 1.0);
}

SphereSymbol SphereSymbol::one_sided(int dim, const Vec& direction, int power) {
  check_dim(dim);
  if (power < 0) throw std::invalid_argument("one_sided: negative power");
  const double len = norm(direction, dim);
  if (len == 0.0) throw std::invalid_argument("one_sided: zero direction");
  Vec u{0.0, 0.0, 0.0};
  for (int i = 0; i < dim; ++i) u[i] = direction[i] / len;
  if (dim == 1) {
    const double plus = std::pow(0.5 * (1.0 + u[0]), power);
    const double minus = std::pow(0.5 * (1.0 - u[0]), power);
    return poles(plus, minus);
  }
  if (dim == 2) {
    // (1 + cos(angle - a)) / 2 = 1/2 + exp(i(angle - a))/4 + exp(-i(angle - a))/4
    const double a = std::atan2(u[1], u[0]);
    const TrigTable base{{-1, 0.25 * std::polar(1.0, a)}, {0, Complex{0.5, 0.0}},
                         {1, 0.25 * std::polar(1.0, -a)}};
    TrigTable table{{0, Complex{1.0, 0.0}}};
    for (int k = 0; k < power; ++k) table = convolve(table, base);
    return trig_polynomial(std::move(table));
  }
  const int kappa = default_kappa(dim);
  double bound = 0.0;
  for (int k = 0; k <= kappa; ++k) bound += std::pow(static_cast<double>(power), k);
  return general(
      dim, [u, power](const Vec& e) { return Complex{std::pow(0.5 * (1.0 + dot(e, u, 3)), power), 0.0}; },
      bound);
}

double SphereSymbol::sup_bound() const {
  if (const auto* p = std::get_if<Poles>(&rep_)) return std::max(std::abs(p->plus), std::abs(p->minus));
  if (const auto* t = std::get_if<TrigTable>(&rep_)) {
    double s = 0.0;
    for (const auto& [m, c] : *t) s += std::abs(c);
    return s;
  }
  return c_kappa_;
}

Complex SphereSymbol::operator()(const Vec& unit) const {
  if (const auto* p = std::get_if<Poles>(&rep_)) return unit[0] >= 0.0 ? p->plus : p->minus;
  if (const auto* t = std::get_if<TrigTable>(&rep_)) return eval_trig(*t, unit);
  return std::get<General>(rep_).eval(unit);
}

SphereSymbol SphereSymbol::times_coordinate(int axis) const {
  if (axis < 0 || axis >= dim_) throw std::invalid_argument("times_coordinate: bad axis");
  if (const auto* p = std::get_if<Poles>(&rep_)) return poles(p->plus, -p->minus);
  if (const auto* t = std::get_if<TrigTable>(&rep_))
    return trig_polynomial(convolve(*t, coordinate_table(axis)));
  auto self = *this;
  // Leibniz: |fg|_{C^k} <= 2^k |f|_{C^k} |g|_{C^k}, with |e_i|_{C^k} <= k + 1
  const double bound = std::ldexp(c_kappa_, kappa_) * (kappa_ + 1.0);
  return general(dim_, [self, axis](const Vec& e) { return self(e) * e[axis]; }, bound, kappa_);
}

SphereSymbol SphereSymbol::conjugate() const {
  if (const auto* p = std::get_if<Poles>(&rep_)) return poles(std::conj(p->plus), std::conj(p->minus));
  if (const auto* t = std::get_if<TrigTable>(&rep_)) {
    TrigTable out;
    for (const auto& [m, c] : *t) out[-m] = std::conj(c);
    return trig_polynomial(std::move(out));
  }
  auto self = *this;
  return general(dim_, [self](const Vec& e) { return std::conj(self(e)); }, c_kappa_, kappa_);
}

SphereSymbol combine(Complex a, const SphereSymbol& x, Complex b, const SphereSymbol& y) {
  if (x.dim_ != y.dim_) throw std::invalid_argument("combine: dimension mismatch");
  using Poles = SphereSymbol::Poles;
  using Table = SphereSymbol::TrigTable;
  const auto* px = std::get_if<Poles>(&x.rep_);
  const auto* py = std::get_if<Poles>(&y.rep_);
  if (px && py) return SphereSymbol::poles(a * px->plus + b * py->plus, a * px->minus + b * py->minus);
  const auto* tx = std::get_if<Table>(&x.rep_);
  const auto* ty = std::get_if<Table>(&y.rep_);
  if (tx && ty) {
    Table out;
    for (const auto& [m, c] : *tx) out[m] += a * c;
    for (const auto& [m, c] : *ty) out[m] += b * c;
    return SphereSymbol::trig_polynomial(std::move(out));
  }
  const double bound = std::abs(a) * x.c_kappa_ + std::abs(b) * y.c_kappa_;
  return SphereSymbol::general(
      x.dim_, [a, b, x, y](const Vec& e) { return a * x(e) + b * y(e); }, bound,
      std::max(x.kappa_, y.kappa_));
}

RdSymbol extend_symbol(const SphereSymbol& psi) {
  RdSymbol out;
  out.dim = psi.dim();
  out.sup_norm = psi.sup_bound();
  out.evaluator = [psi](const Vec& xi) -> Complex {
    const int d = psi.dim();
    const double r = norm(xi, d);
    if (r == 0.0) return 0.0;
    Vec e{0.0, 0.0, 0.0};
    for (int i = 0; i < d; ++i) e[i] = xi[i] / r;
    return psi(e);
  };
  return out;
}

SphereSymbol hilbert_symbol() { return SphereSymbol::poles(Complex{0.0, -1.0}, Complex{0.0, 1.0}); }

}  // namespace hdtk

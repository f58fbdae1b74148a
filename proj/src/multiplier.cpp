#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hdtk/multiplier.hpp"
#include "sampling.hpp"

namespace hdtk {

GridFunction apply_lattice_multiplier(const GridFunction& f,
                                      const std::function<Complex(const Index3&)>& m) {
  const int d = f.dim();
  const int n = f.resolution();
  std::vector<Complex> symbol(f.size());
  bool identity = true;
  bool zero = true;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Complex v = m(lattice_frequency(d, n, i));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::domain_error("apply_multiplier: symbol is not finite on the lattice");
    identity = identity && v == Complex{1.0, 0.0};
    zero = zero && v == Complex{};
    symbol[i] = v;
  }
  if (identity) return f;
  if (zero) return GridFunction::zeros(d, n);
  const SpectralFunction spec = dft(f);
  std::vector<Complex> coeffs(spec.coefficients().begin(), spec.coefficients().end());
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= symbol[i];
  return idft(SpectralFunction(d, n, std::move(coeffs)));
}

GridFunction apply_multiplier(const GridFunction& f, const RdSymbol& m) {
  if (m.dim != f.dim()) throw std::invalid_argument("apply_multiplier: dimension mismatch");
  return apply_lattice_multiplier(f, [&](const Index3& k) {
    return m(Vec{static_cast<double>(k[0]), static_cast<double>(k[1]), static_cast<double>(k[2])});
  });
}

double lattice_sup(const RdSymbol& m, int dim, int resolution) {
  double sup = 0.0;
  const std::size_t total = static_cast<std::size_t>(std::pow(resolution, dim));
  for (std::size_t i = 0; i < total; ++i) {
    const Index3 k = lattice_frequency(dim, resolution, i);
    sup = std::max(sup, std::abs(m(Vec{static_cast<double>(k[0]), static_cast<double>(k[1]),
                                       static_cast<double>(k[2])})));
  }
  return sup;
}

namespace {

double lattice_norm(const Index3& k, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += static_cast<double>(k[i]) * k[i];
  return std::sqrt(s);
}

}  // namespace

GridFunction riesz_transform(const GridFunction& f, int axis) {
  const int d = f.dim();
  if (axis < 0 || axis >= d) throw std::invalid_argument("riesz_transform: bad axis");
  return apply_lattice_multiplier(f, [d, axis](const Index3& k) {
    const double r = lattice_norm(k, d);
    if (r == 0.0) return Complex{};
    return Complex{0.0, -k[axis] / r};
  });
}

GridFunction riesz_potential(const GridFunction& f) {
  const int d = f.dim();
  return apply_lattice_multiplier(f, [d](const Index3& k) {
    const double r = lattice_norm(k, d);
    if (r == 0.0) return Complex{};
    return Complex{1.0 / (2.0 * std::numbers::pi * r), 0.0};
  });
}

GridFunction spectral_derivative(const GridFunction& f, int axis) {
  const int d = f.dim();
  const int n = f.resolution();
  if (axis < 0 || axis >= d) throw std::invalid_argument("spectral_derivative: bad axis");
  return apply_lattice_multiplier(f, [n, axis](const Index3& k) {
    if (k[axis] == -n / 2) return Complex{};
    return Complex{0.0, 2.0 * std::numbers::pi * k[axis]};
  });
}

GridFunction multiplication_op(const GridFunction& f, const GridFunction& b) {
  if (!f.same_shape(b)) throw std::invalid_argument("multiplication_op: shape mismatch");
  return b * f;
}

RdSymbol multiplier_symbol(const SphereSymbol& psi) {
  RdSymbol m = extend_symbol(psi);
  const auto dirs = detail::sample_directions(psi.dim(), 64);
  const Complex first = psi(dirs.front());
  bool constant = true;
  for (const auto& e : dirs) constant = constant && psi(e) == first;
  if (constant) m.evaluator = [first](const Vec&) { return first; };
  return m;
}

GridFunction commutator(const GridFunction& f, const SphereSymbol& psi, const GridFunction& b) {
  if (!f.same_shape(b)) throw std::invalid_argument("commutator: shape mismatch");
  if (psi.dim() != f.dim()) throw std::invalid_argument("commutator: dimension mismatch");
  const RdSymbol m = multiplier_symbol(psi);
  return apply_multiplier(b * f, m) - b * apply_multiplier(f, m);
}

GridFunction real_part(const GridFunction& f) {
  std::vector<Complex> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return GridFunction(f.dim(), f.resolution(), std::move(out));
}

}  // namespace hdtk

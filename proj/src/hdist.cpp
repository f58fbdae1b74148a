#include "hdtk/hdist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hdtk/error.hpp"

namespace hdtk {
namespace {

double conjugate_exponent(double p) {
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

Vec unit_of(const Index3& k, int dim) {
  Vec v{0.0, 0.0, 0.0};
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += static_cast<double>(k[i]) * k[i];
  const double r = std::sqrt(s);
  if (r == 0.0) throw std::invalid_argument("k: wavevector must be nonzero");
  for (int i = 0; i < dim; ++i) v[i] = k[i] / r;
  return v;
}

void check_schedule(const SequenceSpec& u, const SequenceSpec& v) {
  if (u.n_schedule != v.n_schedule) throw std::invalid_argument("n_schedule: u and v schedules differ");
  if (u.n_schedule.size() < 3) throw std::invalid_argument("n_schedule: need at least three points");
}

MuOptions mu_options(const HDistOptions& options) {
  MuOptions m;
  m.p = options.p;
  m.cutoff = options.cutoff;
  return m;
}

}  // namespace

MuValue mu_n_detail(const GridFunction& u, const GridFunction& v, const GridFunction& phi1,
                    const GridFunction& phi2, const SphereSymbol& psi, const MuOptions& options) {
  if (!u.same_shape(v) || !u.same_shape(phi1) || !u.same_shape(phi2))
    throw std::invalid_argument("mu_n: shape mismatch");
  if (psi.dim() != u.dim()) throw std::invalid_argument("mu_n: symbol dimension mismatch");
  if (!(options.p >= 1.0)) throw std::invalid_argument("mu_n: p must be at least 1");
  GridFunction right = phi2 * v;
  if (options.cutoff) {
    if (!options.cutoff->same_shape(u)) throw std::invalid_argument("mu_n: cutoff shape mismatch");
    right = right * *options.cutoff;
  }
  const GridFunction left = phi1 * u;
  const GridFunction a_right = apply_multiplier(right, multiplier_symbol(psi));
  const GridFunction a_left = apply_multiplier(left, multiplier_symbol(psi.conjugate()));

  MuValue out;
  out.value = pair(a_right, left, true);
  out.adjoint = pair(right, a_left, true);
  out.bound = lp_norm(left, options.p) * lp_norm(a_right, conjugate_exponent(options.p));

  const double slack = options.adjoint_tol * std::max(out.bound, 1e-300);
  if (std::abs(out.value - out.adjoint) > slack) {
    std::ostringstream msg;
    msg << "mu_n: adjoint form differs by " << std::abs(out.value - out.adjoint)
        << " (bound " << out.bound << ")";
    throw AssertionFailure(msg.str());
  }
  if (std::abs(out.value) > out.bound * (1.0 + 1e-12) + 1e-300) {
    std::ostringstream msg;
    msg << "mu_n: |mu| = " << std::abs(out.value) << " exceeds the Hölder bound " << out.bound;
    throw AssertionFailure(msg.str());
  }
  return out;
}

Complex mu_n(const GridFunction& u, const GridFunction& v, const GridFunction& phi1,
             const GridFunction& phi2, const SphereSymbol& psi, const MuOptions& options) {
  return mu_n_detail(u, v, phi1, phi2, psi, options).value;
}

HDistEvaluation evaluate_hdist(const SequenceSpec& u, const SequenceSpec& v,
                               const GridFunction& phi1, const GridFunction& phi2,
                               const SphereSymbol& psi, int resolution,
                               const HDistOptions& options) {
  check_schedule(u, v);
  validate(u, resolution);
  validate(v, resolution);
  HDistEvaluation out;
  const MuOptions mo = mu_options(options);
  for (int n : u.n_schedule) {
    const MuValue m =
        mu_n_detail(generate(u, n, resolution), generate(v, n, resolution), phi1, phi2, psi, mo);
    out.n_values.push_back(n);
    out.mu_values.push_back(m.value);
    out.bounds.push_back(m.bound);
    out.bound_value = std::max(out.bound_value, m.bound);
  }
  const std::size_t last = out.mu_values.size() - 1;
  out.limit_estimate = out.mu_values[last];
  out.cauchy_residual = std::abs(out.mu_values[last] - out.mu_values[last - 1]);
  out.converged = out.cauchy_residual <= options.rel_tol * std::abs(out.limit_estimate);
  return out;
}

Complex oscillation_oracle(const GridFunction& a, const GridFunction& b, const Index3& k,
                           const GridFunction& phi1, const GridFunction& phi2,
                           const SphereSymbol& psi, bool real_form) {
  const int d = a.dim();
  const Vec e = unit_of(k, d);
  const Complex base = pair(phi2 * b, phi1 * a, true);
  if (!real_form) return psi(e) * base;
  Vec minus{-e[0], -e[1], -e[2]};
  return 0.5 * (psi(e) + psi(minus)) * base;
}

double constraint_proxy(const GridFunction& u, const std::vector<GridFunction>& coefficients) {
  const int d = u.dim();
  if (static_cast<int>(coefficients.size()) != d)
    throw std::invalid_argument("A: need one coefficient per dimension");
  GridFunction f = GridFunction::zeros(d, u.resolution());
  for (int i = 0; i < d; ++i) f = f + spectral_derivative(coefficients[i] * u, i);
  const SpectralFunction fh = dft(f);
  double s = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const Index3 xi = fh.frequency(i);
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += static_cast<double>(xi[a]) * xi[a];
    s += std::norm(fh[i]) / (1.0 + r2);
  }
  return std::sqrt(s);
}

LocalizationResult localization_residual(const SequenceSpec& u, const SequenceSpec& v,
                                         const std::vector<GridFunction>& coefficients,
                                         const GridFunction& phi, const SphereSymbol& psi,
                                         int resolution, const HDistOptions& options) {
  check_schedule(u, v);
  validate(u, resolution);
  validate(v, resolution);
  const int d = u.dim;
  if (static_cast<int>(coefficients.size()) != d)
    throw std::invalid_argument("A: need one coefficient per dimension");
  const GridFunction one = GridFunction::constant(d, resolution, 1.0);
  const MuOptions mo = mu_options(options);
  std::vector<SphereSymbol> weighted;
  for (int i = 0; i < d; ++i) weighted.push_back(psi.times_coordinate(i));

  LocalizationResult out;
  for (int n : u.n_schedule) {
    const GridFunction un = generate(u, n, resolution);
    const GridFunction vn = generate(v, n, resolution);
    Complex r{};
    for (int i = 0; i < d; ++i) r += mu_n(un, vn, coefficients[i] * phi, one, weighted[i], mo);
    out.n_values.push_back(n);
    out.residuals.push_back(r);
    out.scales.push_back(std::abs(mu_n(un, vn, phi, one, psi, mo)));
    out.constraint_proxy.push_back(constraint_proxy(un, coefficients));
  }
  out.residual = out.residuals.back();
  out.scale = out.scales.back();
  out.proxy_decreasing = true;
  for (std::size_t i = 1; i < out.constraint_proxy.size(); ++i)
    out.proxy_decreasing = out.proxy_decreasing && out.constraint_proxy[i] < out.constraint_proxy[i - 1];
  return out;
}

DivCurlReport divcurl_check(const DivCurlInput& input, int resolution, const HDistOptions& options) {
  const auto& schedule = input.u.components[0].n_schedule;
  for (const VectorSequence* s : {&input.u, &input.v, &input.control})
    for (const auto& c : s->components) {
      if (c.dim != 2) throw std::invalid_argument("divcurl: sequences must live in d = 2");
      if (c.n_schedule != schedule) throw std::invalid_argument("n_schedule: components differ");
      validate(c, resolution);
    }
  if (schedule.size() < 3) throw std::invalid_argument("n_schedule: need at least three points");
  if (input.psi_set.empty()) throw std::invalid_argument("psi_set: must not be empty");
  const GridFunction one = GridFunction::constant(2, resolution, 1.0);
  const MuOptions mo = mu_options(options);

  DivCurlReport out;
  double div_first = 0.0, curl_first = 0.0, div_max = 0.0, curl_max = 0.0, size_max = 0.0;
  for (int n : schedule) {
    std::array<GridFunction, 2> u{generate(input.u.components[0], n, resolution),
                                  generate(input.u.components[1], n, resolution)};
    std::array<GridFunction, 2> v{generate(input.v.components[0], n, resolution),
                                  generate(input.v.components[1], n, resolution)};
    std::array<GridFunction, 2> w{generate(input.control.components[0], n, resolution),
                                  generate(input.control.components[1], n, resolution)};
    DivCurlRow row;
    row.n = n;
    row.vague_constrained = std::abs(pair(input.phi * (u[0] * v[0] + u[1] * v[1]), one, false));
    row.vague_control = std::abs(pair(input.phi * (w[0] * w[0] + w[1] * w[1]), one, false));
    row.div_u = lp_norm(spectral_derivative(u[0], 0) + spectral_derivative(u[1], 1), 2.0);
    row.curl_v = lp_norm(spectral_derivative(v[0], 1) - spectral_derivative(v[1], 0), 2.0);
    size_max = std::max({size_max, 2.0 * std::numbers::pi * n * (lp_norm(u[0], 2.0) + lp_norm(u[1], 2.0)),
                         2.0 * std::numbers::pi * n * (lp_norm(v[0], 2.0) + lp_norm(v[1], 2.0))});
    if (out.rows.empty()) {
      div_first = row.div_u;
      curl_first = row.curl_v;
    }
    div_max = std::max(div_max, row.div_u);
    curl_max = std::max(curl_max, row.curl_v);

    out.mu.clear();
    out.residuals.clear();
    for (const auto& psi : input.psi_set) {
      std::array<std::array<Complex, 2>, 2> plain{}, e1{}, e2{};
      const SphereSymbol p1 = psi.times_coordinate(0);
      const SphereSymbol p2 = psi.times_coordinate(1);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          plain[i][j] = mu_n(u[i], v[j], input.phi, one, psi, mo);
          e1[i][j] = mu_n(u[i], v[j], input.phi, one, p1, mo);
          e2[i][j] = mu_n(u[i], v[j], input.phi, one, p2, mo);
          row.max_mu = std::max(row.max_mu, std::abs(plain[i][j]));
        }
      const std::array<Complex, 4> r{e1[0][0] + e2[1][0], e1[0][1] + e2[1][1],
                                     e2[0][0] - e1[0][1], e2[1][0] - e1[1][1]};
      for (const auto& x : r) row.max_relation_residual = std::max(row.max_relation_residual, std::abs(x));
      out.mu.push_back(plain);
      out.residuals.push_back(r);
    }
    out.rows.push_back(row);
  }
  // bounded premises: no growth along the schedule beyond a factor 2, or at
  // rounding level relative to the size of the gradients
  const double floor = 1e-9 * size_max;
  out.premises_ok = div_max <= std::max(2.0 * div_first, floor) && curl_max <= std::max(2.0 * curl_first, floor);
  return out;
}

std::vector<double> commutator_decay(const SequenceSpec& spec, const SphereSymbol& psi,
                                     const GridFunction& b, double q, int resolution) {
  if (!(q > 2.0)) throw std::invalid_argument("q: must exceed 2");
  validate(spec, resolution);
  std::vector<double> out;
  for (int n : spec.n_schedule) out.push_back(lp_norm(commutator(generate(spec, n, resolution), psi, b), q));
  return out;
}

}  // namespace hdtk

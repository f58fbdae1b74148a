#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hdtk/multiplier.hpp"

namespace hdtk {

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t z = root + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

// |v|^(q-1) sign(v), normalised so that the result has unit L^(q') norm when
// |v|_q = 1; this is the norming functional of v in L^q.
GridFunction duality_map(const GridFunction& v, double q) {
  const double nv = lp_norm(v, q);
  std::vector<Complex> out(v.size());
  if (nv == 0.0) return GridFunction(v.dim(), v.resolution(), std::move(out));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Complex w = v[i] / nv;
    const double a = std::abs(w);
    out[i] = a == 0.0 ? Complex{} : std::pow(a, q - 1.0) * (w / a);
  }
  return GridFunction(v.dim(), v.resolution(), std::move(out));
}

class Sampler {
 public:
  Sampler(int dim, int n, std::uint64_t seed) : dim_(dim), n_(n), rng_(seed) {}

  GridFunction random_field() {
    const int band = std::max(2, n_ / 8);
    return random_band_limited(dim_, n_, band, true, true, rng_);
  }

  GridFunction box_bump() {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> width(0.125, 0.5);
    Vec lo{0.0, 0.0, 0.0}, w{1.0, 1.0, 1.0};
    for (int i = 0; i < dim_; ++i) {
      lo[i] = unit(rng_);
      w[i] = width(rng_);
    }
    const auto inside = [&](const Vec& x) {
      for (int i = 0; i < dim_; ++i) {
        const double t = x[i] - lo[i];
        if (t - std::floor(t) >= w[i]) return false;
      }
      return true;
    };
    return subtract_mean(make_grid_function(dim_, n_, [&](const Vec& x) {
      return Complex{inside(x) ? 1.0 : 0.0, 0.0};
    }));
  }

  GridFunction modulated_bump() {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr int degree = 8;
    Vec c{0.0, 0.0, 0.0};
    for (int i = 0; i < dim_; ++i) c[i] = unit(rng_);
    std::uniform_int_distribution<int> freq(degree + 1, std::max(degree + 1, n_ / 4));
    const int k = freq(rng_);
    const GridFunction bump = periodic_bump(dim_, n_, c, degree);
    const GridFunction wave = make_grid_function(dim_, n_, [k](const Vec& x) {
      return std::polar(1.0, 2.0 * std::numbers::pi * k * x[0]);
    });
    return bump * wave;
  }

  GridFunction lacunary_sum() {
    std::bernoulli_distribution sign(0.5);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<std::pair<double, double>> terms;
    for (int k = 1; k < n_ / 2; k *= 2) terms.emplace_back(sign(rng_) ? 1.0 : -1.0, phase(rng_));
    return make_grid_function(dim_, n_, [&](const Vec& x) {
      double s = 0.0;
      int k = 1;
      for (const auto& [e, a] : terms) {
        s += e * std::cos(2.0 * std::numbers::pi * k * x[0] + a);
        k *= 2;
      }
      return Complex{s, 0.0};
    });
  }

  GridFunction draw(int kind) {
    switch (kind % 4) {
      case 0: return random_field();
      case 1: return box_bump();
      case 2: return modulated_bump();
      default: return lacunary_sum();
    }
  }

 private:
  int dim_;
  int n_;
  std::mt19937_64 rng_;
};

}  // namespace

OpNormEstimate estimate_op_norm(const RdSymbol& m, double p, int trials, std::uint64_t seed,
                                const OpNormOptions& options) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("estimate_op_norm: p must lie in (1, inf)");
  if (trials < 1) throw std::invalid_argument("estimate_op_norm: trials must be positive");
  if (m.dim != options.dim) throw std::invalid_argument("estimate_op_norm: dimension mismatch");
  const double q = p / (p - 1.0);
  RdSymbol adjoint = m;
  adjoint.evaluator = [m](const Vec& xi) { return std::conj(m(xi)); };

  OpNormEstimate out;
  out.pp1_factor = p * (p - 1.0);
  out.max_factor = std::max(p, 1.0 / (p - 1.0));
  for (int t = 0; t < trials; ++t) {
    Sampler sampler(options.dim, options.resolution, derive_seed(seed, static_cast<std::uint64_t>(t)));
    GridFunction x = sampler.draw(t);
    const double nx = lp_norm(x, p);
    if (nx > 0.0) {
      x = Complex{1.0 / nx, 0.0} * x;
      // nonlinear power iteration for max |Tx|_p / |x|_p
      for (int it = 0; it <= options.power_iterations; ++it) {
        const GridFunction y = apply_multiplier(x, m);
        const double ratio = lp_norm(y, p) / lp_norm(x, p);
        out.value = std::max(out.value, ratio);
        if (ratio == 0.0 || it == options.power_iterations) break;
        const GridFunction z = apply_multiplier(duality_map(y, p), adjoint);
        if (lp_norm(z, q) == 0.0) break;
        x = duality_map(z, q);
      }
    }
    out.running_max.push_back(out.value);
  }
  return out;
}

}  // namespace hdtk

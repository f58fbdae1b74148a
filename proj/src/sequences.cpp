#include "hdtk/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hdtk {
namespace {

constexpr double kTailTolerance = 1e-8;

int linf(const Index3& k, int dim) {
  int m = 0;
  for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(k[i]));
  return m;
}

// exp(2 pi i n k.m / N) with the phase reduced exactly in integers.
Complex lattice_wave(const Index3& k, int n, const Index3& m, int dim, int resolution) {
  long long s = 0;
  for (int i = 0; i < dim; ++i) s += static_cast<long long>(k[i]) * m[i];
  s = (s * n) % resolution;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(s) / resolution);
}

GridFunction amplitude_or(const std::optional<GridFunction>& a, int dim, int resolution,
                          double fallback, const char* field) {
  if (!a) return GridFunction::constant(dim, resolution, fallback);
  if (a->dim() != dim || a->resolution() != resolution)
    throw std::invalid_argument(std::string(field) + ": amplitude grid does not match the target grid");
  return *a;
}

GridFunction oscillation(const SequenceSpec& spec, int n, int resolution) {
  const int d = spec.dim;
  const GridFunction a = amplitude_or(spec.amplitude, d, resolution, 1.0, "amplitude");
  std::vector<Complex> out(a.size());
  if (spec.kind == SequenceKind::modulated_oscillation) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Complex w = lattice_wave(spec.k, n, a.multi_index(i), d, resolution);
      out[i] = spec.real_form ? std::sqrt(2.0) * a[i] * w.real() : a[i] * w;
    }
  } else {
    const GridFunction a2 = amplitude_or(spec.amplitude2, d, resolution, 0.0, "amplitude2");
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Index3 m = a.multi_index(i);
      out[i] = a[i] * lattice_wave(spec.k, n, m, d, resolution).real() +
               a2[i] * lattice_wave(spec.k2, n, m, d, resolution).real();
    }
  }
  return GridFunction(d, resolution, std::move(out));
}

GridFunction concentration(const SequenceSpec& spec, int n, int resolution) {
  const int d = spec.dim;
  const auto profile = spec.profile ? spec.profile : mexican_hat(d, spec.width);
  const double amp = std::pow(static_cast<double>(n), d / spec.p);
  const int images = d == 1 ? 3 : d == 2 ? 9 : 27;
  double principal = 0.0;
  double leaked = 0.0;
  GridFunction u = make_grid_function(d, resolution, [&](const Vec& x) {
    Vec y{0.0, 0.0, 0.0};
    for (int i = 0; i < d; ++i) {
      y[i] = x[i] - spec.center[i];
      y[i] -= std::round(y[i]);
    }
    double v = 0.0;
    for (int img = 0; img < images; ++img) {
      Vec z = y;
      int code = img;
      bool home = true;
      for (int i = 0; i < d; ++i) {
        const int shift = code % 3 - 1;
        code /= 3;
        home = home && shift == 0;
        z[i] = n * (y[i] + shift);
      }
      const double w = profile(z);
      if (home)
        principal += std::abs(w);
      else
        leaked += std::abs(w);
      v += w;
    }
    return Complex{amp * v, 0.0};
  });
  if (!(principal > 0.0) || leaked > kTailTolerance * principal)
    throw std::invalid_argument("concentration: periodization tail exceeds 1e-8 of the mass at n = " +
                                std::to_string(n));
  const SpectralFunction spec_u = dft(u);
  double total = 0.0, high = 0.0;
  for (std::size_t i = 0; i < spec_u.size(); ++i) {
    const double e = std::norm(spec_u[i]);
    total += e;
    if (linf(spec_u.frequency(i), d) >= resolution / 4) high += e;
  }
  if (high > kTailTolerance * total)
    throw std::invalid_argument("concentration: spectral tail beyond N/4 exceeds 1e-8 at n = " +
                                std::to_string(n));
  return u;
}

}  // namespace

std::string to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::modulated_oscillation: return "modulated_oscillation";
    case SequenceKind::concentration: return "concentration";
    case SequenceKind::pair_oscillation: return "pair_oscillation";
    case SequenceKind::custom: return "custom";
  }
  return "unknown";
}

SequenceKind parse_sequence_kind(const std::string& name) {
  for (auto k : {SequenceKind::modulated_oscillation, SequenceKind::concentration,
                 SequenceKind::pair_oscillation, SequenceKind::custom})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown sequence kind '" + name + "'");
}

std::function<double(const Vec&)> mexican_hat(int dim, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("mexican_hat: width must be positive");
  return [dim, width](const Vec& y) {
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) r2 += (y[i] / width) * (y[i] / width);
    return (dim - 2.0 * std::numbers::pi * r2) * std::exp(-std::numbers::pi * r2);
  };
}

void validate(const SequenceSpec& spec, int resolution) {
  if (spec.dim < 1 || spec.dim > 3) throw std::invalid_argument("dim: must be 1, 2 or 3");
  for (std::size_t i = 1; i < spec.n_schedule.size(); ++i)
    if (spec.n_schedule[i] <= spec.n_schedule[i - 1])
      throw std::invalid_argument("n_schedule: must be strictly increasing");
  for (int n : spec.n_schedule)
    if (n < 1) throw std::invalid_argument("n_schedule: entries must be positive");
  switch (spec.kind) {
    case SequenceKind::modulated_oscillation:
    case SequenceKind::pair_oscillation: {
      if (linf(spec.k, spec.dim) == 0) throw std::invalid_argument("k: wavevector must be nonzero");
      const int kmax = std::max(linf(spec.k, spec.dim),
                                spec.kind == SequenceKind::pair_oscillation ? linf(spec.k2, spec.dim) : 0);
      for (int n : spec.n_schedule)
        if (static_cast<long long>(n) * kmax >= resolution / 4)
          throw std::invalid_argument("n_schedule: n |k|_inf = " + std::to_string(n * kmax) +
                                      " violates the band limit N/4 = " + std::to_string(resolution / 4));
      break;
    }
    case SequenceKind::concentration:
      if (!(spec.p > 1.0)) throw std::invalid_argument("p: concentration exponent must exceed 1");
      if (!(spec.width > 0.0)) throw std::invalid_argument("width: must be positive");
      break;
    case SequenceKind::custom:
      if (!spec.generator) throw std::invalid_argument("generator: custom sequence needs a generator");
      break;
  }
}

GridFunction generate(const SequenceSpec& spec, int n, int resolution) {
  SequenceSpec single = spec;
  single.n_schedule = {n};
  validate(single, resolution);
  GridFunction u = GridFunction::zeros(spec.dim, resolution);
  switch (spec.kind) {
    case SequenceKind::modulated_oscillation:
    case SequenceKind::pair_oscillation: u = oscillation(spec, n, resolution); break;
    case SequenceKind::concentration: u = concentration(spec, n, resolution); break;
    case SequenceKind::custom: u = spec.generator(n, resolution); break;
  }
  if (u.dim() != spec.dim || u.resolution() != resolution)
    throw std::invalid_argument("generator: output grid does not match the target grid");
  return subtract_mean(u);
}

GridFunction truncate(const GridFunction& f, double level) {
  if (!(level > 0.0)) throw std::invalid_argument("truncate: level must be positive");
  if (!f.is_real()) throw std::invalid_argument("truncate: f must be real-valued");
  std::vector<Complex> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = f[i].real();
    out[i] = std::abs(v) <= level ? v : 0.0;
  }
  return GridFunction(f.dim(), f.resolution(), std::move(out));
}

std::vector<double> convergence_in_measure(const std::vector<GridFunction>& sequence,
                                           const GridFunction& limit, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("convergence_in_measure: eps must be positive");
  std::vector<double> out;
  for (const auto& u : sequence) {
    if (!u.same_shape(limit)) throw std::invalid_argument("convergence_in_measure: shape mismatch");
    std::size_t count = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (std::abs(u[i] - limit[i]) > eps) ++count;
    out.push_back(static_cast<double>(count) / static_cast<double>(u.size()));
  }
  return out;
}

}  // namespace hdtk

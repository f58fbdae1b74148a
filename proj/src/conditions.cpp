#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <json.hpp>

#include "fft.hpp"
#include "hdtk/decomp.hpp"
#include "sampling.hpp"

namespace hdtk {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using Gauss = boost::math::quadrature::gauss<double, 30>;

std::size_t box_size(int dim, int n) {
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
  return total;
}

int default_box_n(int dim) { return dim == 1 ? 512 : dim == 2 ? 256 : 64; }

struct Box {
  int n;
  double length;
};

Box resolve_box(const RdSymbol& phi, const BoxOptions& options) {
  Box box{options.box_n > 0 ? options.box_n : default_box_n(phi.dim), options.box_l};
  if (box.n < 8 || box.n % 2 != 0) throw std::invalid_argument("box_n must be even and >= 8");
  if (box.length <= 0.0) {
    if (!phi.support_annulus)
      throw std::invalid_argument("symbol has no known compact support; pass box_l explicitly");
    box.length = 4.0 * phi.support_annulus->second;
  }
  if (options.check_support) {
    if (!phi.support_annulus)
      throw std::invalid_argument("symbol has no known compact support");
    if (phi.support_annulus->second > 0.5 * box.length)
      throw std::invalid_argument("under-resolved support: radius " +
                                  std::to_string(phi.support_annulus->second) +
                                  " exceeds half the box length " +
                                  std::to_string(0.5 * box.length));
  }
  return box;
}

/// Samples of phi (times an optional weight) on the symbol box in FFT order.
std::vector<Complex> sample_on_box(const RdSymbol& phi, const Box& box) {
  const double h = box.length / box.n;
  std::vector<Complex> data(box_size(phi.dim, box.n));
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    const Index3 k = lattice_frequency(phi.dim, box.n, flat);
    Vec xi{0.0, 0.0, 0.0};
    for (int i = 0; i < phi.dim; ++i) xi[i] = k[i] * h;
    data[flat] = phi(xi);
    if (!std::isfinite(data[flat].real()) || !std::isfinite(data[flat].imag()))
      throw std::domain_error("symbol is not finite on the quadrature box");
  }
  return data;
}

/// Fbar(samples) at x = m / L, FFT order.
std::vector<Complex> inverse_on_box(std::vector<Complex> data, int dim, const Box& box) {
  detail::fft_inplace(data, dim, box.n, detail::FftDirection::backward);
  const double cell = std::pow(box.length / box.n, dim);
  for (auto& v : data) v *= cell;
  return data;
}

double l1_on_box(const std::vector<Complex>& spatial, int dim, const Box& box) {
  double s = 0.0;
  for (const auto& v : spatial) s += std::abs(v);
  return s / std::pow(box.length, dim);
}

double weighted_l2_on_box(const std::vector<Complex>& spatial, int dim, const Box& box,
                          double kappa, int axis) {
  double s = 0.0;
  for (std::size_t flat = 0; flat < spatial.size(); ++flat) {
    const double a2 = std::norm(spatial[flat]);
    if (a2 == 0.0) continue;
    if (kappa == 0.0) {
      s += a2;
      continue;
    }
    const Index3 m = lattice_frequency(dim, box.n, flat);
    const double x = std::abs(m[axis] / box.length);
    if (x == 0.0) continue;
    s += std::pow(x, 2.0 * kappa) * a2;
  }
  return s / std::pow(box.length, dim);
}

std::vector<Complex> apply_shift(const std::vector<Complex>& samples, int dim, const Box& box,
                                 const Vec& y) {
  const double h = box.length / box.n;
  std::vector<Complex> out(samples.size());
  for (std::size_t flat = 0; flat < samples.size(); ++flat) {
    if (samples[flat] == Complex{}) continue;
    const Index3 k = lattice_frequency(dim, box.n, flat);
    double phase = 0.0;
    for (int i = 0; i < dim; ++i) phase += y[i] * k[i] * h;
    out[flat] = samples[flat] * detail::shift_factor(kTwoPi * phase);
  }
  return out;
}

void check_shift_fits(const Vec& y, int dim, const Box& box) {
  const double half = 0.5 * box.n / box.length;
  for (int i = 0; i < dim; ++i)
    if (std::abs(y[i]) > 0.25 * half)
      throw std::invalid_argument("shift exceeds a quarter of the spatial box half-width");
}

// Fornberg's recursion for finite-difference weights at 0 on the given nodes.
std::vector<double> fd_weights(int order, const std::vector<double>& nodes) {
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][order];
  return w;
}

/// Centered stencil, fourth-order accurate, for the k-th derivative (unit spacing).
struct Stencil {
  std::vector<int> offsets;
  std::vector<double> weights;
};

Stencil centered_stencil(int order) {
  Stencil s;
  if (order == 0) {
    s.offsets = {0};
    s.weights = {1.0};
    return s;
  }
  const int half = (order + 1) / 2 + 1;
  std::vector<double> nodes;
  for (int o = -half; o <= half; ++o) {
    s.offsets.push_back(o);
    nodes.push_back(o);
  }
  s.weights = fd_weights(order, nodes);
  return s;
}

std::vector<Index3> multi_indices(int dim, int max_order) {
  std::vector<Index3> out;
  for (int total = 0; total <= max_order; ++total) {
    for (int a0 = total; a0 >= 0; --a0) {
      if (dim == 1) {
        if (a0 == total) out.push_back({a0, 0, 0});
        continue;
      }
      for (int a1 = total - a0; a1 >= 0; --a1) {
        const int a2 = total - a0 - a1;
        if (dim == 2 && a2 != 0) continue;
        out.push_back({a0, a1, a2});
      }
    }
  }
  return out;
}

std::string alpha_label(const Index3& alpha, int dim) {
  std::ostringstream s;
  s << "alpha=(";
  for (int i = 0; i < dim; ++i) s << (i ? "," : "") << alpha[i];
  s << ")";
  return s.str();
}

/// D^alpha phi at xi via tensor-product stencils with spacing h.
Complex derivative(const RdSymbol& phi, const std::array<Stencil, 3>& stencils, int dim,
                   const Vec& xi, double h) {
  Complex acc{};
  const std::size_t n0 = stencils[0].offsets.size();
  const std::size_t n1 = dim > 1 ? stencils[1].offsets.size() : 1;
  const std::size_t n2 = dim > 2 ? stencils[2].offsets.size() : 1;
  for (std::size_t a = 0; a < n0; ++a) {
    for (std::size_t b = 0; b < n1; ++b) {
      for (std::size_t c = 0; c < n2; ++c) {
        Vec p = xi;
        double w = stencils[0].weights[a];
        p[0] += stencils[0].offsets[a] * h;
        if (dim > 1) {
          w *= stencils[1].weights[b];
          p[1] += stencils[1].offsets[b] * h;
        }
        if (dim > 2) {
          w *= stencils[2].weights[c];
          p[2] += stencils[2].offsets[c] * h;
        }
        if (w != 0.0) acc += w * phi(p);
      }
    }
  }
  return acc;
}

/// int over r/2 <= |xi| <= r of g(xi) with Gauss panels in the radius.
double annulus_integral(int dim, double r, const ClassicalOptions& opt,
                        const std::function<double(const Vec&)>& g) {
  const double lo = 0.5 * r;
  const double width = (r - lo) / opt.radial_panels;
  double total = 0.0;
  for (int panel = 0; panel < opt.radial_panels; ++panel) {
    const double a = lo + panel * width;
    const double b = a + width;
    total += Gauss::integrate(
        [&](double rho) {
          if (dim == 1) return g({rho, 0.0, 0.0}) + g({-rho, 0.0, 0.0});
          if (dim == 2) {
            double s = 0.0;
            for (int k = 0; k < opt.angular_nodes; ++k) {
              const double ang = kTwoPi * k / opt.angular_nodes;
              s += g({rho * std::cos(ang), rho * std::sin(ang), 0.0});
            }
            return s * kTwoPi / opt.angular_nodes * rho;
          }
          const double polar = Gauss::integrate(
              [&](double mu) {
                const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
                double s = 0.0;
                for (int k = 0; k < opt.angular_nodes; ++k) {
                  const double ang = kTwoPi * k / opt.angular_nodes;
                  s += g({rho * st * std::cos(ang), rho * st * std::sin(ang), rho * mu});
                }
                return s * kTwoPi / opt.angular_nodes;
              },
              -1.0, 1.0);
          return polar * rho * rho;
        },
        a, b);
  }
  return total;
}

void finish(ConditionReport& report) {
  report.passed = report.failure.empty() && std::isfinite(report.constant_estimate) &&
                  report.constant_estimate <= report.cap;
}

}  // namespace

std::string to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::classical_hm: return "classical_hm";
    case ConditionKind::fractional_c1x3: return "fractional_c1x3";
    case ConditionKind::fractional_c1x4: return "fractional_c1x4";
    case ConditionKind::singular_kernel: return "singular_kernel";
  }
  return "unknown";
}

void write_csv(std::ostream& out, const ConditionReport& report) {
  out << "scale,lhs,rhs_factor,ratio\n";
  const auto old = out.precision(17);
  for (const auto& row : report.per_scale_table)
    out << row.scale << ',' << row.lhs << ',' << row.rhs_factor << ',' << row.ratio() << '\n';
  out.precision(old);
}

std::string summary_json(const ConditionReport& report) {
  nlohmann::json j;
  j["kind"] = to_string(report.kind);
  j["constant_estimate"] =
      std::isfinite(report.constant_estimate) ? nlohmann::json(report.constant_estimate) : nlohmann::json();
  j["cap"] = report.cap;
  j["passed"] = report.passed;
  j["failure"] = report.failure;
  j["warnings"] = report.warnings;
  return j.dump();
}

double fractional_seminorm(const RdSymbol& phi_j, double kappa, int axis, const BoxOptions& box) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("fractional_seminorm: kappa must be >= 0");
  if (axis < 0 || axis >= phi_j.dim) throw std::invalid_argument("fractional_seminorm: bad axis");
  const Box b = resolve_box(phi_j, box);
  const auto spatial = inverse_on_box(sample_on_box(phi_j, b), phi_j.dim, b);
  return weighted_l2_on_box(spatial, phi_j.dim, b, kappa, axis);
}

double shifted_difference_l1(const RdSymbol& phi_j, const Vec& y, const BoxOptions& box) {
  const Box b = resolve_box(phi_j, box);
  check_shift_fits(y, phi_j.dim, b);
  const auto samples = sample_on_box(phi_j, b);
  const auto spatial = inverse_on_box(apply_shift(samples, phi_j.dim, b, y), phi_j.dim, b);
  return l1_on_box(spatial, phi_j.dim, b);
}

ConditionReport check_hm_classical(const RdSymbol& phi, int kappa,
                                   const std::vector<double>& r_grid,
                                   const ClassicalOptions& options) {
  if (kappa < 0) throw std::invalid_argument("check_hm_classical: kappa must be >= 0");
  if (options.radial_panels < 1 || options.angular_nodes < 4)
    throw std::invalid_argument("check_hm_classical: bad quadrature options");
  ConditionReport report;
  report.kind = ConditionKind::classical_hm;
  report.cap = options.cap;
  const int d = phi.dim;
  const auto alphas = multi_indices(d, kappa);

  for (const double r : r_grid) {
    if (!(r > 0.0)) throw std::invalid_argument("check_hm_classical: radii must be positive");
    const double h = r * options.step_ratio;
    for (const auto& alpha : alphas) {
      const std::array<Stencil, 3> st{centered_stencil(alpha[0]), centered_stencil(alpha[1]),
                                      centered_stencil(alpha[2])};
      const int order = alpha[0] + alpha[1] + alpha[2];
      const double hscale = std::pow(h, -order);
      const double lhs = annulus_integral(d, r, options, [&](const Vec& xi) {
        return std::norm(derivative(phi, st, d, xi, h) * hscale);
      });
      if (!std::isfinite(lhs)) {
        if (report.failure.empty()) {
          std::ostringstream msg;
          msg << "non-finite derivative integral at r=" << r << ", " << alpha_label(alpha, d);
          report.failure = msg.str();
        }
        continue;
      }
      const double rhs = std::pow(r, d - 2 * order);
      report.per_scale_table.push_back({r, lhs, rhs, alpha_label(alpha, d)});
      report.constant_estimate = std::max(report.constant_estimate, std::sqrt(lhs / rhs));
    }
  }
  if (!report.failure.empty()) report.constant_estimate = std::numeric_limits<double>::infinity();
  finish(report);
  return report;
}

FractionalCheck check_fractional(const RdSymbol& phi, double kappa,
                                 const DyadicPartition& partition, int j_lo, int j_hi,
                                 const std::vector<Vec>& y_samples,
                                 const FractionalOptions& options) {
  const int d = phi.dim;
  if (!(kappa > 0.5 * d)) throw std::invalid_argument("check_fractional: kappa must exceed d/2");
  if (j_lo > j_hi) throw std::invalid_argument("check_fractional: empty j range");
  FractionalCheck out;
  out.p1.kind = ConditionKind::fractional_c1x3;
  out.p1.cap = options.p1_cap;
  out.p2.kind = ConditionKind::fractional_c1x4;
  out.p2.cap = options.p2_cap;
  out.p2.warnings.push_back("phi_{j,y}(xi) taken as (exp(-2 pi i y.xi) - 1) phi_j(xi)");

  for (int j = j_lo; j <= j_hi; ++j) {
    const RdSymbol piece = dyadic_piece(phi, j, partition);
    const Box box = resolve_box(piece, BoxOptions{options.box_n, 0.0, true});
    const auto samples = sample_on_box(piece, box);
    const auto spatial = inverse_on_box(samples, d, box);
    const double scale = std::ldexp(1.0, j);
    const double rhs1 = std::pow(scale, d - 2.0 * kappa);
    for (int axis = 0; axis < d; ++axis) {
      const double lhs = weighted_l2_on_box(spatial, d, box, kappa, axis);
      out.p1.per_scale_table.push_back({scale, lhs, rhs1, "axis=" + std::to_string(axis)});
      out.p1.constant_estimate = std::max(out.p1.constant_estimate, lhs / rhs1);
    }
    for (const auto& eta : y_samples) {
      const Vec y = options.shift_scaling == ShiftScaling::dyadic ? detail::scaled(eta, 1.0 / scale) : eta;
      const double t = scale * norm(y, d);
      if (t == 0.0) throw std::invalid_argument("check_fractional: shifts must be nonzero");
      check_shift_fits(y, d, box);
      const auto diff = inverse_on_box(apply_shift(samples, d, box, y), d, box);
      const double lhs = l1_on_box(diff, d, box);
      const double rhs = t * std::pow(2.0 + t, kappa);
      std::ostringstream label;
      label << "|y|=" << norm(y, d);
      out.p2.per_scale_table.push_back({scale, lhs, rhs, label.str()});
      out.p2.constant_estimate = std::max(out.p2.constant_estimate, lhs / rhs);
    }
  }
  finish(out.p1);
  finish(out.p2);
  out.passed = out.p1.passed && out.p2.passed;
  return out;
}

BoxKernel sample_kernel(int dim, int n, double box_length,
                        const std::function<Complex(const Vec&)>& kernel) {
  if (!(box_length > 0.0)) throw std::invalid_argument("sample_kernel: box length must be positive");
  auto samples = make_grid_function(dim, n, [&](const Vec& x) {
    Vec z{0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i) {
      // grid point m/N maps to the centered coordinate of index m
      const double m = std::round(x[i] * n);
      z[i] = (m < n / 2 ? m : m - n) * box_length / n;
    }
    return kernel(z);
  });
  return BoxKernel{std::move(samples), box_length};
}

ConditionReport singular_kernel_profile(const BoxKernel& kernel, const std::vector<double>& s_grid,
                                        const std::vector<Vec>& y_samples,
                                        const std::vector<double>& t_grid, double cap) {
  const GridFunction& k = kernel.samples;
  const int d = k.dim();
  const int n = k.resolution();
  const double L = kernel.box_length;
  const double cell = std::pow(L / n, d);
  ConditionReport report;
  report.kind = ConditionKind::singular_kernel;
  report.cap = cap;

  std::vector<Vec> coords(k.size());
  std::vector<double> radius(k.size());
  double total_mass = 0.0;
  double tail_mass = 0.0;
  for (std::size_t flat = 0; flat < k.size(); ++flat) {
    const Index3 m = lattice_frequency(d, n, flat);
    double linf = 0.0;
    for (int i = 0; i < d; ++i) {
      coords[flat][i] = m[i] * L / n;
      linf = std::max(linf, std::abs(coords[flat][i]));
    }
    radius[flat] = norm(coords[flat], d);
    const double a = std::abs(k[flat]) * cell;
    total_mass += a;
    if (linf >= 0.375 * L) tail_mass += a;
  }
  if (total_mass > 0.0 && tail_mass > 0.01 * total_mass) {
    std::ostringstream msg;
    msg << "kernel tail mass " << tail_mass / total_mass << " of total lies near the box edge";
    report.warnings.push_back(msg.str());
  }

  std::vector<Complex> spectrum(k.values().begin(), k.values().end());
  detail::fft_inplace(spectrum, d, n, detail::FftDirection::forward);
  for (auto& c : spectrum) c /= static_cast<double>(k.size());

  for (const double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("singular_kernel_profile: t must be positive");
    for (const auto& y : y_samples) {
      const Vec shift = detail::scaled(y, 1.0 / t);
      // K(z - Y) via the Fourier shift theorem on the box
      std::vector<Complex> shifted(spectrum.size());
      for (std::size_t flat = 0; flat < spectrum.size(); ++flat) {
        const Index3 m = lattice_frequency(d, n, flat);
        double phase = 0.0;
        for (int i = 0; i < d; ++i) phase += m[i] * shift[i] / L;
        shifted[flat] = spectrum[flat] * std::polar(1.0, -kTwoPi * phase);
      }
      detail::fft_inplace(shifted, d, n, detail::FftDirection::backward);
      bool shift_warned = false;
      for (int i = 0; i < d; ++i) shift_warned = shift_warned || std::abs(shift[i]) > 0.25 * L;
      if (shift_warned) report.warnings.push_back("rescaled shift exceeds a quarter of the box");

      for (const double s : s_grid) {
        if (!(s > 0.0)) throw std::invalid_argument("singular_kernel_profile: s must be positive");
        if (norm(y, d) > 0.5 * s) continue;
        const double cut = s / t;
        if (cut > 0.5 * L) {
          report.warnings.push_back("s/t exceeds the box half-width; region truncated");
        }
        // cells straddling the sphere count by the radial fraction lying outside it
        const double h = L / n;
        double acc = 0.0;
        for (std::size_t flat = 0; flat < k.size(); ++flat) {
          const double w = std::clamp((radius[flat] - cut) / h + 0.5, 0.0, 1.0);
          if (w > 0.0) acc += w * std::abs(shifted[flat] - k[flat]);
        }
        acc *= cell;
        std::ostringstream label;
        label << "t=" << t << ",|y|=" << norm(y, d);
        report.per_scale_table.push_back({s, acc, 1.0, label.str()});
        report.constant_estimate = std::max(report.constant_estimate, acc);
      }
    }
  }
  std::sort(report.warnings.begin(), report.warnings.end());
  report.warnings.erase(std::unique(report.warnings.begin(), report.warnings.end()),
                        report.warnings.end());
  finish(report);
  return report;
}

}  // namespace hdtk

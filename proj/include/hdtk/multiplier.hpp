#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <variant>
#include <vector>

#include "hdtk/decomp.hpp"
#include "hdtk/grid.hpp"

namespace hdtk {

/// A symbol psi on the unit sphere S^(d-1) together with its smoothness order
/// kappa (default floor(d/2) + 1) and c_kappa_norm, the sum over |alpha| <= kappa
/// of sup |d^alpha psi| in the sphere parametrisation.
///
/// Three representations are kept so that products with coordinates, linear
/// combinations and conjugation stay exact where possible:
///  - d = 1: the two values psi(+1), psi(-1) (S^0 has no derivatives);
///  - d = 2: a trigonometric polynomial sum_m c_m exp(i m angle);
///  - any d: an arbitrary callable with a caller-supplied norm bound.
class SphereSymbol {
 public:
  using TrigTable = std::map<int, Complex>;

  static SphereSymbol constant(int dim, Complex value);
  static SphereSymbol poles(Complex plus, Complex minus);
  static SphereSymbol trig_polynomial(TrigTable coefficients);
  static SphereSymbol general(int dim, std::function<Complex(const Vec&)> eval,
                              double c_kappa_norm, int kappa = -1);
  /// e -> e_axis
  static SphereSymbol coordinate(int dim, int axis);
  /// e -> ((1 + e.u) / 2)^power with u = direction/|direction|; equals 1 at u
  /// and vanishes at -u.
  static SphereSymbol one_sided(int dim, const Vec& direction, int power);

  int dim() const { return dim_; }
  int kappa() const { return kappa_; }
  double c_kappa_norm() const { return c_kappa_; }
  /// Upper bound on sup |psi|.
  double sup_bound() const;

  Complex operator()(const Vec& unit) const;

  /// e -> psi(e) * e_axis
  SphereSymbol times_coordinate(int axis) const;
  SphereSymbol conjugate() const;

  friend SphereSymbol combine(Complex a, const SphereSymbol& x, Complex b, const SphereSymbol& y);

 private:
  struct Poles {
    Complex plus, minus;
  };
  struct General {
    std::function<Complex(const Vec&)> eval;
  };
  using Rep = std::variant<Poles, TrigTable, General>;

  SphereSymbol(int dim, int kappa, Rep rep, double c_kappa);
  static double trig_c_kappa(const TrigTable& table, int kappa);

  int dim_;
  int kappa_;
  Rep rep_;
  double c_kappa_;
};

SphereSymbol combine(Complex a, const SphereSymbol& x, Complex b, const SphereSymbol& y);

/// xi -> psi(xi/|xi|), 0 at the origin; exactly 0-homogeneous.
RdSymbol extend_symbol(const SphereSymbol& psi);

/// extend_symbol, except that a constant psi is kept as the scalar operator
/// (its value is also used at xi = 0).
RdSymbol multiplier_symbol(const SphereSymbol& psi);

/// The d = 1 sign symbol -i sgn(xi).
SphereSymbol hilbert_symbol();

/// idft(m(xi) * dft(f)[xi]) on the integer lattice. When m is identically 1
/// on the lattice (including xi = 0) the input is returned unchanged.
GridFunction apply_multiplier(const GridFunction& f, const RdSymbol& m);

/// Multiplier given directly on lattice frequencies.
GridFunction apply_lattice_multiplier(const GridFunction& f,
                                      const std::function<Complex(const Index3&)>& m);

/// sup over the frequency lattice of |m|.
double lattice_sup(const RdSymbol& m, int dim, int resolution);

/// R_j: symbol xi_j / (i |xi|), 0 at the origin.
GridFunction riesz_transform(const GridFunction& f, int axis);
/// I_1: symbol 1 / (2 pi |xi|), 0 at the origin.
GridFunction riesz_potential(const GridFunction& f);
/// d/dx_axis via the symbol 2 pi i xi_axis; the Nyquist mode is dropped.
GridFunction spectral_derivative(const GridFunction& f, int axis);

GridFunction multiplication_op(const GridFunction& f, const GridFunction& b);

/// A_psi(b f) - b A_psi(f). A constant psi is applied as a scalar (including
/// at xi = 0), so its commutator is exactly zero.
GridFunction commutator(const GridFunction& f, const SphereSymbol& psi, const GridFunction& b);

GridFunction real_part(const GridFunction& f);

struct OpNormEstimate {
  double value = 0.0;                // max over all trials
  std::vector<double> running_max;   // value after trial t
  double pp1_factor = 0.0;         // p (p - 1)
  double max_factor = 0.0;           // max(p, 1/(p - 1))
};

struct OpNormOptions {
  int dim = 1;
  int resolution = 256;
  int power_iterations = 25;
};

/// Empirical lower bound on |T_m|_{L^p -> L^p} over a seeded test family
/// (band-limited random fields, translated box bumps, modulated smooth bumps,
/// +-1 lacunary sums), each refined by a nonlinear power iteration.
/// Deterministic given the seed; nondecreasing in the number of trials.
OpNormEstimate estimate_op_norm(const RdSymbol& m, double p, int trials, std::uint64_t seed,
                                const OpNormOptions& options = {});

/// Child seed `index` derived from a root seed (SplitMix64 step).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

}  // namespace hdtk

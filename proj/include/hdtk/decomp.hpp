#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdtk/grid.hpp"

namespace hdtk {

/// A symbol on R^d: evaluator, a bound on |evaluator|, and (optionally) the
/// annulus r_lo <= |xi| <= r_hi outside of which it vanishes.
struct RdSymbol {
  int dim = 1;
  std::function<Complex(const Vec&)> evaluator;
  double sup_norm = 0.0;
  std::optional<std::pair<double, double>> support_annulus;

  Complex operator()(const Vec& xi) const { return evaluator(xi); }
};

RdSymbol constant_symbol(int dim, Complex value);

/// Default seed: exp(1 - 1/(1 - t^2)) with t = log2|xi| for |t| < 1, else 0.
double default_seed(const Vec& xi, int dim);

/// Littlewood-Paley pair built from a seed Theta supported in 1/2 <= |xi| <= 2.
///
/// theta(xi) = Theta(xi) / sum_{j in Z} Theta(2^-j xi), theta(0) = 0. The
/// normalising sum is taken over every j (only finitely many terms are
/// nonzero), so sum_j theta(2^-j xi) = 1 for every xi != 0.
class DyadicPartition {
 public:
  DyadicPartition(int dim, std::function<double(const Vec&)> seed, int j_min, int j_max);

  int dim() const { return dim_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }

  double seed(const Vec& xi) const { return seed_(xi); }
  double theta(const Vec& xi) const;
  /// theta(2^-j xi)
  double scaled_theta(int j, const Vec& xi) const;
  /// sum_{j=j_min}^{j_max} theta(2^-j xi)
  double partial_sum(const Vec& xi) const;

 private:
  int dim_;
  std::function<double(const Vec&)> seed_;
  int j_min_;
  int j_max_;
};

/// Validates the seed by sampling; throws std::invalid_argument when it is
/// negative, leaks outside 1/2 <= |xi| <= 2, or vanishes on 2^-1/2 <= |xi| <= 2^1/2.
DyadicPartition build_partition(int dim, std::function<double(const Vec&)> seed, int j_min,
                                int j_max);
DyadicPartition build_partition(int dim, int j_min, int j_max);

/// phi_j(xi) = phi(xi) theta(2^-j xi), supported in 2^(j-1) <= |xi| <= 2^(j+1).
RdSymbol dyadic_piece(const RdSymbol& phi, int j, const DyadicPartition& partition);

/// psi_N(xi) = sum_{j=-N}^{N} phi_j(xi).
RdSymbol psi_n_symbol(const RdSymbol& phi, int n, const DyadicPartition& partition);

/// Quadrature box [-L/2, L/2]^d sampled with box_n points per axis on the
/// symbol side. Zero fields pick the defaults (L = 4 * outer support radius,
/// box_n = 512 / 256 / 64 for d = 1 / 2 / 3).
struct BoxOptions {
  int box_n = 0;
  double box_l = 0.0;
  bool check_support = true;
};

/// int |x_i|^(2 kappa) |Fbar(phi_j)(x)|^2 dx, which equals the squared L2 norm of
/// the order-kappa fractional derivative of phi_j along axis i.
double fractional_seminorm(const RdSymbol& phi_j, double kappa, int axis,
                           const BoxOptions& box = {});

/// int |Fbar(phi_{j,y})(x)| dx with phi_{j,y}(xi) = (exp(-2 pi i y.xi) - 1) phi_j(xi),
/// i.e. the L1 distance between Fbar(phi_j) and its translate by y.
double shifted_difference_l1(const RdSymbol& phi_j, const Vec& y, const BoxOptions& box = {});

enum class ConditionKind { classical_hm, fractional_c1x3, fractional_c1x4, singular_kernel };

std::string to_string(ConditionKind kind);

struct ScaleRow {
  double scale = 0.0;
  double lhs = 0.0;
  double rhs_factor = 1.0;
  std::string label;

  double ratio() const { return rhs_factor > 0.0 ? lhs / rhs_factor : 0.0; }
};

struct ConditionReport {
  ConditionKind kind = ConditionKind::classical_hm;
  double constant_estimate = 0.0;
  double cap = 0.0;
  bool passed = false;
  std::vector<ScaleRow> per_scale_table;
  std::string failure;
  std::vector<std::string> warnings;
};

/// `scale,lhs,rhs_factor,ratio`
void write_csv(std::ostream& out, const ConditionReport& report);
/// {"kind", "constant_estimate", "cap", "passed", "failure", "warnings"}
std::string summary_json(const ConditionReport& report);

struct ClassicalOptions {
  double cap = 1e3;
  int radial_panels = 4;
  int angular_nodes = 128;
  /// finite-difference step as a fraction of the annulus radius
  double step_ratio = 1.0 / 256.0;
};

/// Checks int_{r/2 <= |xi| <= r} |D^alpha phi|^2 <= k^2 r^(d - 2|alpha|) for
/// every |alpha| <= kappa and r in r_grid; constant_estimate is the best k.
ConditionReport check_hm_classical(const RdSymbol& phi, int kappa,
                                   const std::vector<double>& r_grid,
                                   const ClassicalOptions& options = {});

/// Shifts are given either directly (absolute) or in units of the dyadic
/// scale, y = 2^-j * eta (dyadic), which samples the same supremum over y.
enum class ShiftScaling { dyadic, absolute };

struct FractionalOptions {
  double p1_cap = 1e6;
  double p2_cap = 1e6;
  ShiftScaling shift_scaling = ShiftScaling::dyadic;
  int box_n = 0;
};

struct FractionalCheck {
  ConditionReport p1;  // fractional_c1x3
  ConditionReport p2;  // fractional_c1x4
  bool passed = false;
};

FractionalCheck check_fractional(const RdSymbol& phi, double kappa,
                                 const DyadicPartition& partition, int j_lo, int j_hi,
                                 const std::vector<Vec>& y_samples,
                                 const FractionalOptions& options = {});

/// Samples of a kernel on the periodic box [-L/2, L/2)^d, origin at index 0
/// (axis index m sits at coordinate (m < N/2 ? m : m - N) * L / N).
struct BoxKernel {
  GridFunction samples;
  double box_length;
};

BoxKernel sample_kernel(int dim, int n, double box_length,
                        const std::function<Complex(const Vec&)>& kernel);

/// c_0 estimate: max over (t, s, y), |y| <= s/2, of
/// int_{|x| >= s} |U_t K(x - y) - U_t K(x)| dx with U_t K(x) = t^-d K(x/t).
ConditionReport singular_kernel_profile(const BoxKernel& kernel, const std::vector<double>& s_grid,
                                        const std::vector<Vec>& y_samples,
                                        const std::vector<double>& t_grid, double cap = 1e3);

/// Dyadic cube. level >= 0: side 2^-level with integer origin (in side units)
/// inside [0,1)^d. level < 0: the enclosing cube [0, 2^-level)^d.
struct DyadicCube {
  int level = 0;
  Index3 origin{0, 0, 0};

  double side() const;
  double measure(int dim) const;
  bool contains_cell(const Index3& cell, int n) const;
};

struct CZPiece {
  DyadicCube cube;
  GridFunction part;           // f_k on [0,1)^d
  double exterior_value = 0.0;  // f_k on the cube outside [0,1)^d
};

/// f (extended by zero off [0,1)^d) = good + sum_k pieces[k].
struct CZDecomposition {
  GridFunction good;
  double good_exterior = 0.0;  // good part on an enclosing cube outside [0,1)^d
  std::vector<CZPiece> pieces;
  double level = 0.0;
};

CZDecomposition cz_decompose(const GridFunction& f, double s);

/// Discrete measurements of the Calderon-Zygmund properties.
struct CZCheck {
  double reconstruction_error = 0.0;  // max |f - good - sum f_k|, including the exterior
  double l1_total = 0.0;              // |good|_1 + sum |f_k|_1
  double l1_f = 0.0;
  double linf_good = 0.0;
  double max_piece_mean = 0.0;  // max |int f_k|
  double total_measure = 0.0;   // sum m(J_k)
  bool supports_ok = true;      // f_k vanishes off J_k
  bool cubes_disjoint = true;
};

CZCheck check_cz(const GridFunction& f, const CZDecomposition& decomposition);

}  // namespace hdtk

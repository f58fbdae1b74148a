#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hdtk/grid.hpp"
#include "hdtk/multiplier.hpp"
#include "hdtk/sequences.hpp"

namespace hdtk {

struct MuOptions {
  double p = 2.0;                // Hölder exponent on the u side
  double adjoint_tol = 1e-10;    // relative to the Hölder bound
  std::optional<GridFunction> cutoff;
};

struct MuValue {
  Complex value;
  Complex adjoint;   // pair(phi2 v, A_conj(psi)(phi1 u)), conjugating
  double bound = 0;  // |phi1 u|_p |A_psi(phi2 v)|_p'
};

/// mu_n = int conj(phi1 u) A_psi(phi2 [cutoff] v) dx, evaluated as
/// pair(A_psi(phi2 v), phi1 u, conjugate = true). A constant psi is applied as a
/// scalar, so psi = 1 reduces to the plain product pairing.
///
/// Throws AssertionFailure when the adjoint form disagrees by more than
/// adjoint_tol * bound or when |mu_n| exceeds the Hölder bound.
MuValue mu_n_detail(const GridFunction& u, const GridFunction& v, const GridFunction& phi1,
                    const GridFunction& phi2, const SphereSymbol& psi, const MuOptions& options = {});

Complex mu_n(const GridFunction& u, const GridFunction& v, const GridFunction& phi1,
             const GridFunction& phi2, const SphereSymbol& psi, const MuOptions& options = {});

struct HDistOptions {
  double p = 2.0;
  double rel_tol = 5e-3;  // Cauchy residual tolerance relative to |limit|
  std::optional<GridFunction> cutoff;
};

struct HDistEvaluation {
  std::vector<int> n_values;
  std::vector<Complex> mu_values;
  std::vector<double> bounds;  // Hölder bound per n
  Complex limit_estimate;
  double cauchy_residual = 0.0;
  double bound_value = 0.0;    // max of bounds
  bool converged = false;
};

/// mu_n along the shared schedule of both specs; the limit is the last value
/// and the Cauchy residual |last - previous|. Needs at least three points.
HDistEvaluation evaluate_hdist(const SequenceSpec& u, const SequenceSpec& v,
                               const GridFunction& phi1, const GridFunction& phi2,
                               const SphereSymbol& psi, int resolution,
                               const HDistOptions& options = {});

/// Closed-form limit for modulated oscillations with shared k:
/// real form 1/2 (psi(k^) + psi(-k^)) int phi1 phi2 a b, complex form psi(k^) int ...
Complex oscillation_oracle(const GridFunction& a, const GridFunction& b, const Index3& k,
                           const GridFunction& phi1, const GridFunction& phi2,
                           const SphereSymbol& psi, bool real_form);

struct LocalizationResult {
  std::vector<int> n_values;
  std::vector<Complex> residuals;  // sum_i mu_n(u, v, A_i phi, 1, psi e_i)
  std::vector<double> scales;      // |mu_n(u, v, phi, 1, psi)|
  std::vector<double> constraint_proxy;
  Complex residual;                // at the last n
  double scale = 0.0;
  bool proxy_decreasing = false;   // false marks the constraint premise as violated
};

/// f_n = sum_i d_i(A_i u_n); proxy |(1 + |xi|^2)^(-1/2) f_n^|_2 on integer xi.
double constraint_proxy(const GridFunction& u, const std::vector<GridFunction>& coefficients);

LocalizationResult localization_residual(const SequenceSpec& u, const SequenceSpec& v,
                                         const std::vector<GridFunction>& coefficients,
                                         const GridFunction& phi, const SphereSymbol& psi,
                                         int resolution, const HDistOptions& options = {});

/// Two-component sequences in d = 2.
struct VectorSequence {
  std::array<SequenceSpec, 2> components;
};

struct DivCurlInput {
  VectorSequence u;        // divergence-bounded
  VectorSequence v;        // curl-bounded
  VectorSequence control;  // used for both factors of the unconstrained control
  GridFunction phi;
  std::vector<SphereSymbol> psi_set;
};

struct DivCurlRow {
  int n = 0;
  double vague_constrained = 0.0;  // |int phi u_n . v_n|
  double vague_control = 0.0;      // |int phi w_n . w_n|
  double max_mu = 0.0;             // max over psi, i, j of |mu^ij|
  double max_relation_residual = 0.0;
  double div_u = 0.0;              // |div u_n|_2
  double curl_v = 0.0;             // |curl v_n|_2
};

struct DivCurlReport {
  std::vector<DivCurlRow> rows;
  /// mu[s][i][j] for psi_set[s] at the last n
  std::vector<std::array<std::array<Complex, 2>, 2>> mu;
  /// residuals[s] = the four relation values for psi_set[s] at the last n
  std::vector<std::array<Complex, 4>> residuals;
  bool premises_ok = false;
};

DivCurlReport divcurl_check(const DivCurlInput& input, int resolution, const HDistOptions& options = {});

/// |C v_n|_q along the schedule with C = A_psi B - B A_psi.
std::vector<double> commutator_decay(const SequenceSpec& spec, const SphereSymbol& psi,
                                     const GridFunction& b, double q, int resolution);

}  // namespace hdtk

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hdtk/grid.hpp"

namespace hdtk {

enum class SequenceKind { modulated_oscillation, concentration, pair_oscillation, custom };

std::string to_string(SequenceKind kind);
SequenceKind parse_sequence_kind(const std::string& name);

/// Mean-zero profile (d - 2 pi |y/w|^2) exp(-pi |y/w|^2).
std::function<double(const Vec&)> mexican_hat(int dim, double width);

/// Recipe for a weakly-null family u_n on the grid [0,1)^dim.
///
///  - modulated_oscillation: a(x) exp(2 pi i n k.x), or sqrt(2) a(x) cos(2 pi n k.x)
///    when real_form is set;
///  - pair_oscillation: a(x) cos(2 pi n k.x) + a2(x) cos(2 pi n k2.x);
///  - concentration: n^(d/p) U(n (x - center)), U periodized (default
///    mexican_hat(dim, width));
///  - custom: whatever `generator(n, N)` returns.
/// Every generated member has its mean subtracted.
struct SequenceSpec {
  SequenceKind kind = SequenceKind::modulated_oscillation;
  int dim = 1;
  std::optional<GridFunction> amplitude;   // a; defaults to 1
  std::optional<GridFunction> amplitude2;  // a2; defaults to 0
  Index3 k{1, 0, 0};
  Index3 k2{0, 0, 0};
  bool real_form = true;
  Vec center{0.5, 0.5, 0.5};
  double p = 2.0;
  double width = 0.25;
  std::function<double(const Vec&)> profile;
  std::function<GridFunction(int n, int resolution)> generator;
  std::vector<int> n_schedule;
};

/// Checks the spec against a target resolution; throws std::invalid_argument
/// naming the offending field.
void validate(const SequenceSpec& spec, int resolution);

/// Member n of the family at resolution N. Throws when n |k|_inf >= N/4 or a
/// concentration profile leaks more than 1e-8 of its mass through the
/// periodization or past the frequency N/4.
GridFunction generate(const SequenceSpec& spec, int n, int resolution);

/// T_l(f): keeps values with |f| <= l and sets the rest to 0.
GridFunction truncate(const GridFunction& f, double level);

/// For each member, the fraction of grid points where |u_n - u| > eps.
std::vector<double> convergence_in_measure(const std::vector<GridFunction>& sequence,
                                           const GridFunction& limit, double eps);

}  // namespace hdtk

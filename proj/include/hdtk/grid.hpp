#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace hdtk {

using Complex = std::complex<double>;

/// Point or frequency in up to three dimensions; components past `dim` are zero.
using Vec = std::array<double, 3>;
using Index3 = std::array<int, 3>;

double norm(const Vec& v, int dim);
double dot(const Vec& a, const Vec& b, int dim);

bool is_power_of_two(long n);

/// Complex samples of a function on the uniform periodic grid over [0,1)^dim.
///
/// Values are stored row-major: the flat index of m = (m0, m1, m2) is
/// (m0 * N + m1) * N + m2, and the sample sits at x = m / N. Instances are
/// immutable once constructed.
class GridFunction {
 public:
  GridFunction(int dim, int resolution, std::vector<Complex> values);

  static GridFunction zeros(int dim, int resolution);
  static GridFunction constant(int dim, int resolution, Complex value);

  int dim() const { return dim_; }
  int resolution() const { return n_; }
  std::size_t size() const { return values_.size(); }
  bool is_real() const { return is_real_; }

  std::span<const Complex> values() const { return values_; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }

  Index3 multi_index(std::size_t flat) const;
  Vec point(std::size_t flat) const;
  bool same_shape(const GridFunction& other) const;

 private:
  int dim_;
  int n_;
  std::vector<Complex> values_;
  bool is_real_;
};

/// Fourier coefficients on the lattice {-N/2, ..., N/2-1}^dim.
///
/// Coefficients are kept in FFT order (axis index k carries frequency k for
/// k < N/2 and k - N otherwise); use `at` for frequency-addressed access.
class SpectralFunction {
 public:
  SpectralFunction(int dim, int resolution, std::vector<Complex> coefficients);

  int dim() const { return dim_; }
  int resolution() const { return n_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<const Complex> coefficients() const { return coeffs_; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }

  /// Coefficient at an integer frequency; components past dim are ignored.
  Complex at(const Index3& frequency) const;
  Index3 frequency(std::size_t flat) const;

 private:
  int dim_;
  int n_;
  std::vector<Complex> coeffs_;
};

/// Integer frequency carried by slot `flat` of an FFT-ordered array.
Index3 lattice_frequency(int dim, int n, std::size_t flat);
std::size_t lattice_slot(int dim, int n, const Index3& frequency);

GridFunction make_grid_function(int dim, int resolution,
                                const std::function<Complex(const Vec&)>& sampler);

/// coefficients[xi] = N^-d * sum_m values[m] exp(-2 pi i xi.m/N)
SpectralFunction dft(const GridFunction& f);
GridFunction idft(const SpectralFunction& spectrum);

/// ((1/N^d) sum |f|^p)^(1/p); pass p = infinity for the max norm.
double lp_norm(const GridFunction& f, double p);

/// (1/N^d) sum f * g, or f * conj(g) when `conjugate` is set.
Complex pair(const GridFunction& f, const GridFunction& g, bool conjugate);

Complex mean(const GridFunction& f);

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(const GridFunction& a, const GridFunction& b);
GridFunction operator*(Complex s, const GridFunction& a);
GridFunction conj(const GridFunction& a);
GridFunction subtract_mean(const GridFunction& a);
double max_abs_difference(const GridFunction& a, const GridFunction& b);

/// Tensor-product trigonometric bump prod_i ((1 + cos 2pi(x_i - c_i)) / 2)^degree.
/// Band-limited to |xi_i| <= degree, nonnegative, peak value 1 at `center`.
GridFunction periodic_bump(int dim, int resolution, const Vec& center, int degree);

/// Random trigonometric polynomial with frequencies |xi|_inf <= band.
/// Coefficients are i.i.d. uniform in the unit square; a real field is
/// produced by Hermitian symmetrization.
GridFunction random_band_limited(int dim, int resolution, int band, bool real,
                                 bool mean_zero, std::mt19937_64& rng);

/// CSV layout: a `dim,N` header line, the two values, then `index,re,im` rows.
void write_csv(std::ostream& out, const GridFunction& f);
GridFunction read_grid_csv(std::istream& in);

}  // namespace hdtk

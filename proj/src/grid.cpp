#include "hdtk/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace hdtk {
namespace {

std::size_t grid_size(int dim, int n) {
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
  return total;
}

void check_shape(int dim, int n) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (n < 8 || !is_power_of_two(n))
    throw std::invalid_argument("grid resolution must be a power of two >= 8, got " +
                                std::to_string(n));
}

void require_same_shape(const GridFunction& a, const GridFunction& b, const char* what) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

template <class Op>
GridFunction zip(const GridFunction& a, const GridFunction& b, Op op, const char* what) {
  require_same_shape(a, b, what);
  std::vector<Complex> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
  return GridFunction(a.dim(), a.resolution(), std::move(out));
}

}  // namespace

double norm(const Vec& v, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

double dot(const Vec& a, const Vec& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

GridFunction::GridFunction(int dim, int resolution, std::vector<Complex> values)
    : dim_(dim), n_(resolution), values_(std::move(values)), is_real_(true) {
  check_shape(dim, resolution);
  if (values_.size() != grid_size(dim, resolution))
    throw std::invalid_argument("grid function: value count does not match N^dim");
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("grid function: non-finite value");
    if (v.imag() != 0.0) is_real_ = false;
  }
}

GridFunction GridFunction::zeros(int dim, int resolution) {
  return constant(dim, resolution, Complex{});
}

GridFunction GridFunction::constant(int dim, int resolution, Complex value) {
  check_shape(dim, resolution);
  return GridFunction(dim, resolution, std::vector<Complex>(grid_size(dim, resolution), value));
}

Index3 GridFunction::multi_index(std::size_t flat) const {
  Index3 m{0, 0, 0};
  for (int axis = dim_ - 1; axis >= 0; --axis) {
    m[axis] = static_cast<int>(flat % static_cast<std::size_t>(n_));
    flat /= static_cast<std::size_t>(n_);
  }
  return m;
}

Vec GridFunction::point(std::size_t flat) const {
  const Index3 m = multi_index(flat);
  Vec x{0.0, 0.0, 0.0};
  for (int i = 0; i < dim_; ++i) x[i] = static_cast<double>(m[i]) / n_;
  return x;
}

bool GridFunction::same_shape(const GridFunction& other) const {
  return dim_ == other.dim_ && n_ == other.n_;
}

SpectralFunction::SpectralFunction(int dim, int resolution, std::vector<Complex> coefficients)
    : dim_(dim), n_(resolution), coeffs_(std::move(coefficients)) {
  check_shape(dim, resolution);
  if (coeffs_.size() != grid_size(dim, resolution))
    throw std::invalid_argument("spectral function: coefficient count does not match N^dim");
}

Complex SpectralFunction::at(const Index3& frequency) const {
  for (int i = 0; i < dim_; ++i)
    if (frequency[i] < -n_ / 2 || frequency[i] >= n_ / 2)
      throw std::out_of_range("frequency outside the lattice");
  return coeffs_[lattice_slot(dim_, n_, frequency)];
}

Index3 SpectralFunction::frequency(std::size_t flat) const {
  return lattice_frequency(dim_, n_, flat);
}

Index3 lattice_frequency(int dim, int n, std::size_t flat) {
  Index3 xi{0, 0, 0};
  for (int axis = dim - 1; axis >= 0; --axis) {
    const int k = static_cast<int>(flat % static_cast<std::size_t>(n));
    flat /= static_cast<std::size_t>(n);
    xi[axis] = k < n / 2 ? k : k - n;
  }
  return xi;
}

std::size_t lattice_slot(int dim, int n, const Index3& frequency) {
  std::size_t flat = 0;
  for (int axis = 0; axis < dim; ++axis) {
    int k = frequency[axis] % n;
    if (k < 0) k += n;
    flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(k);
  }
  return flat;
}

GridFunction make_grid_function(int dim, int resolution,
                                const std::function<Complex(const Vec&)>& sampler) {
  check_shape(dim, resolution);
  const std::size_t total = grid_size(dim, resolution);
  std::vector<Complex> values(total);
  Index3 m{0, 0, 0};
  for (std::size_t flat = 0; flat < total; ++flat) {
    Vec x{0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i) x[i] = static_cast<double>(m[i]) / resolution;
    values[flat] = sampler(x);
    if (!std::isfinite(values[flat].real()) || !std::isfinite(values[flat].imag())) {
      std::ostringstream msg;
      msg << "sampler returned a non-finite value at grid index " << flat;
      throw std::invalid_argument(msg.str());
    }
    for (int axis = dim - 1; axis >= 0; --axis) {
      if (++m[axis] < resolution) break;
      m[axis] = 0;
    }
  }
  return GridFunction(dim, resolution, std::move(values));
}

SpectralFunction dft(const GridFunction& f) {
  std::vector<Complex> data(f.values().begin(), f.values().end());
  detail::fft_inplace(data, f.dim(), f.resolution(), detail::FftDirection::forward);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& c : data) c *= scale;
  return SpectralFunction(f.dim(), f.resolution(), std::move(data));
}

GridFunction idft(const SpectralFunction& spectrum) {
  std::vector<Complex> data(spectrum.coefficients().begin(), spectrum.coefficients().end());
  detail::fft_inplace(data, spectrum.dim(), spectrum.resolution(),
                      detail::FftDirection::backward);
  return GridFunction(spectrum.dim(), spectrum.resolution(), std::move(data));
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  // Rescale by the max to keep |v|^p in range for large p.
  double peak = 0.0;
  for (const auto& v : f.values()) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& v : f.values()) s += std::pow(std::abs(v) / peak, p);
  return peak * std::pow(s / static_cast<double>(f.size()), 1.0 / p);
}

Complex pair(const GridFunction& f, const GridFunction& g, bool conjugate) {
  require_same_shape(f, g, "pair");
  Complex s{};
  for (std::size_t i = 0; i < f.size(); ++i) s += conjugate ? f[i] * std::conj(g[i]) : f[i] * g[i];
  return s / static_cast<double>(f.size());
}

Complex mean(const GridFunction& f) {
  Complex s{};
  for (const auto& v : f.values()) s += v;
  return s / static_cast<double>(f.size());
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  return zip(a, b, [](Complex x, Complex y) { return x + y; }, "add");
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  return zip(a, b, [](Complex x, Complex y) { return x - y; }, "subtract");
}

GridFunction operator*(const GridFunction& a, const GridFunction& b) {
  return zip(a, b, [](Complex x, Complex y) { return x * y; }, "multiply");
}

GridFunction operator*(Complex s, const GridFunction& a) {
  std::vector<Complex> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * a[i];
  return GridFunction(a.dim(), a.resolution(), std::move(out));
}

GridFunction conj(const GridFunction& a) {
  std::vector<Complex> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::conj(a[i]);
  return GridFunction(a.dim(), a.resolution(), std::move(out));
}

GridFunction subtract_mean(const GridFunction& a) {
  const Complex m = mean(a);
  std::vector<Complex> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - m;
  if (a.is_real())
    for (auto& v : out) v.imag(0.0);
  return GridFunction(a.dim(), a.resolution(), std::move(out));
}

double max_abs_difference(const GridFunction& a, const GridFunction& b) {
  require_same_shape(a, b, "max_abs_difference");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

GridFunction periodic_bump(int dim, int resolution, const Vec& center, int degree) {
  if (degree < 0) throw std::invalid_argument("periodic_bump: negative degree");
  return make_grid_function(dim, resolution, [&](const Vec& x) {
    double v = 1.0;
    for (int i = 0; i < dim; ++i)
      v *= std::pow(0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * (x[i] - center[i]))), degree);
    return Complex{v, 0.0};
  });
}

GridFunction random_band_limited(int dim, int resolution, int band, bool real, bool mean_zero,
                                 std::mt19937_64& rng) {
  check_shape(dim, resolution);
  if (band < 0 || band >= resolution / 2)
    throw std::invalid_argument("random_band_limited: band must lie in [0, N/2)");
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Complex> coeffs(grid_size(dim, resolution));
  for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
    const Index3 xi = lattice_frequency(dim, resolution, flat);
    bool inside = true;
    for (int i = 0; i < dim; ++i) inside = inside && std::abs(xi[i]) <= band;
    // Draw for every slot so the stream does not depend on the band.
    const Complex c{unit(rng), unit(rng)};
    if (inside) coeffs[flat] = c;
  }
  if (mean_zero) coeffs[0] = 0.0;
  if (real) {
    std::vector<Complex> sym(coeffs.size());
    for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
      Index3 xi = lattice_frequency(dim, resolution, flat);
      Index3 neg{-xi[0], -xi[1], -xi[2]};
      sym[flat] = 0.5 * (coeffs[flat] + std::conj(coeffs[lattice_slot(dim, resolution, neg)]));
    }
    coeffs = std::move(sym);
  }
  auto f = idft(SpectralFunction(dim, resolution, std::move(coeffs)));
  if (!real) return f;
  std::vector<Complex> values(f.values().begin(), f.values().end());
  for (auto& v : values) v.imag(0.0);
  return GridFunction(dim, resolution, std::move(values));
}

void write_csv(std::ostream& out, const GridFunction& f) {
  out << "dim,N\n" << f.dim() << ',' << f.resolution() << "\nindex,re,im\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i)
    out << i << ',' << f[i].real() << ',' << f[i].imag() << '\n';
}

GridFunction read_grid_csv(std::istream& in) {
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw std::runtime_error(std::string("grid csv: missing ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  next("header");
  if (line != "dim,N") throw std::runtime_error("grid csv: expected header 'dim,N'");
  next("shape");
  int dim = 0, n = 0;
  char comma = 0;
  std::istringstream shape(line);
  if (!(shape >> dim >> comma >> n) || comma != ',')
    throw std::runtime_error("grid csv: malformed shape line");
  check_shape(dim, n);
  next("row header");
  if (line != "index,re,im") throw std::runtime_error("grid csv: expected header 'index,re,im'");
  std::vector<Complex> values(grid_size(dim, n));
  std::vector<bool> seen(values.size(), false);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
      throw std::runtime_error("grid csv: malformed row '" + line + "'");
    const std::size_t idx = std::stoull(a);
    if (idx >= values.size() || seen[idx])
      throw std::runtime_error("grid csv: bad or repeated index " + a);
    values[idx] = Complex{std::stod(b), std::stod(c)};
    seen[idx] = true;
    ++rows;
  }
  if (rows != values.size()) throw std::runtime_error("grid csv: missing rows");
  return GridFunction(dim, n, std::move(values));
}

}  // namespace hdtk

#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace hdtk::detail {
namespace {

// A plan bound to its own aligned scratch buffer; callers copy through it.
class CachedPlan {
 public:
  CachedPlan(int dim, int n, FftDirection dir) {
    std::size_t total = 1;
    int dims[3];
    for (int i = 0; i < dim; ++i) {
      dims[i] = n;
      total *= static_cast<std::size_t>(n);
    }
    size_ = total;
    buffer_ = fftw_alloc_complex(total);
    if (buffer_ == nullptr) throw std::bad_alloc();
    plan_ = fftw_plan_dft(dim, dims, buffer_, buffer_, static_cast<int>(dir), FFTW_ESTIMATE);
    if (plan_ == nullptr) {
      fftw_free(buffer_);
      throw std::runtime_error("fftw planning failed");
    }
  }
  CachedPlan(const CachedPlan&) = delete;
  CachedPlan& operator=(const CachedPlan&) = delete;
  ~CachedPlan() {
    fftw_destroy_plan(plan_);
    fftw_free(buffer_);
  }

  void run(std::span<std::complex<double>> data) {
    std::memcpy(buffer_, data.data(), size_ * sizeof(fftw_complex));
    fftw_execute(plan_);
    std::memcpy(static_cast<void*>(data.data()), buffer_, size_ * sizeof(fftw_complex));
  }

 private:
  std::size_t size_ = 0;
  fftw_complex* buffer_ = nullptr;
  fftw_plan plan_ = nullptr;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void fft_inplace(std::span<std::complex<double>> data, int dim, int n, FftDirection dir) {
  if (dim < 1 || dim > 3 || n < 1) throw std::invalid_argument("fft: bad shape");
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
  if (data.size() != total) throw std::invalid_argument("fft: size mismatch");

  using Key = std::tuple<int, int, int>;
  thread_local std::map<Key, std::unique_ptr<CachedPlan>> cache;
  auto key = Key{dim, n, static_cast<int>(dir)};
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::lock_guard lock(planner_mutex());
    it = cache.emplace(key, std::make_unique<CachedPlan>(dim, n, dir)).first;
  }
  it->second->run(data);
}

}  // namespace hdtk::detail

#include "fourier.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "mcflab/common.hpp"

namespace mcflab::detail {
namespace {

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [m, plans] : plans_) {
      fftw_destroy_plan(plans.r2c);
      fftw_destroy_plan(plans.c2r);
    }
  }

  PlanPair get(int m) {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(m); it != plans_.end()) return it->second;
    std::vector<double> real(static_cast<std::size_t>(m));
    std::vector<std::complex<double>> cplx(static_cast<std::size_t>(m / 2 + 1));
    auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair plans;
    plans.r2c = fftw_plan_dft_r2c_1d(m, real.data(), c, flags);
    plans.c2r = fftw_plan_dft_c2r_1d(m, c, real.data(), flags | FFTW_DESTROY_INPUT);
    if (plans.r2c == nullptr || plans.c2r == nullptr) {
      throw Error(ErrorCode::unsupported, "FFTW could not plan a transform of size " +
                                              std::to_string(m));
    }
    plans_.emplace(m, plans);
    return plans;
  }

 private:
  std::mutex mutex_;
  std::map<int, PlanPair> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const double> in) {
  const int m = static_cast<int>(in.size());
  if (m < 1) throw Error(ErrorCode::invalid_input, "empty sample vector");
  std::vector<double> buffer(in.begin(), in.end());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(m / 2 + 1));
  fftw_execute_dft_r2c(cache().get(m).r2c, buffer.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> inverse(std::span<const std::complex<double>> spectrum, int m) {
  if (static_cast<int>(spectrum.size()) != m / 2 + 1) {
    throw Error(ErrorCode::invalid_input, "spectrum length does not match transform size");
  }
  std::vector<std::complex<double>> buffer(spectrum.begin(), spectrum.end());
  std::vector<double> out(static_cast<std::size_t>(m));
  fftw_execute_dft_c2r(cache().get(m).c2r, reinterpret_cast<fftw_complex*>(buffer.data()),
                       out.data());
  return out;
}

}  // namespace mcflab::detail

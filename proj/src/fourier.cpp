#include "nlsrep/fourier.hpp"

#include <fftw3.h>

#include <mutex>

#include "nlsrep/error.hpp"

namespace nlsrep {

namespace {
// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fourier::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

Fourier::Fourier(int d, std::size_t n) : total_(1), plans_(new Plans) {
  int dims[3];
  for (int a = 0; a < d; ++a) {
    dims[a] = static_cast<int>(n);
    total_ *= n;
  }
  std::vector<std::complex<double>> scratch(total_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  // Estimate-mode plans are chosen deterministically, and unaligned plans
  // never pick alignment-dependent codelets, so results do not depend on
  // where std::vector happened to allocate.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->forward = fftw_plan_dft(d, dims, buf, buf, FFTW_FORWARD, flags);
  plans_->backward = fftw_plan_dft(d, dims, buf, buf, FFTW_BACKWARD, flags);
  if (plans_->forward == nullptr || plans_->backward == nullptr) {
    if (plans_->forward) fftw_destroy_plan(plans_->forward);
    if (plans_->backward) fftw_destroy_plan(plans_->backward);
    delete plans_;
    throw Error(ErrorCode::resource, "FFTW could not create a plan");
  }
}

Fourier::~Fourier() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plans_->forward);
  fftw_destroy_plan(plans_->backward);
  delete plans_;
}

void Fourier::forward(std::span<std::complex<double>> data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->forward, p, p);
}

void Fourier::inverse(std::span<std::complex<double>> data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->backward, p, p);
  const double scale = 1.0 / static_cast<double>(total_);
  for (auto& z : data) z *= scale;
}

}  // namespace nlsrep

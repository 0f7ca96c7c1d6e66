#include "gfdet/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace gfdet {

namespace {
// FFTW plan creation is not thread-safe; execution on distinct plans is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("Fft: length must be positive");
  std::lock_guard<std::mutex> lock(plan_mutex());
  std::vector<cxd> buf(static_cast<std::size_t>(n));
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  // FFTW_UNALIGNED lets the plans run on any caller buffer.
  fwd_ = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!fwd_ || !bwd_) throw numeric_error("Fft: plan creation failed");
}

Fft::~Fft() {
  if (fwd_ || bwd_) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  }
}

Fft::Fft(Fft&& other) noexcept : n_(other.n_), fwd_(other.fwd_), bwd_(other.bwd_) {
  other.fwd_ = other.bwd_ = nullptr;
}

Fft& Fft::operator=(Fft&& other) noexcept {
  if (this != &other) {
    this->~Fft();
    n_ = other.n_;
    fwd_ = other.fwd_;
    bwd_ = other.bwd_;
    other.fwd_ = other.bwd_ = nullptr;
  }
  return *this;
}

void Fft::forward_inplace(cxd* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void Fft::inverse_inplace(cxd* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
  const double s = 1.0 / n_;
  for (int i = 0; i < n_; ++i) data[i] *= s;
}

VectorXcd Fft::forward(VectorXcd v) const {
  forward_inplace(v.data());
  return v;
}

VectorXcd Fft::inverse(VectorXcd v) const {
  inverse_inplace(v.data());
  return v;
}

void Fft::forward_cols(MatrixXcd& m) const {
  for (Eigen::Index c = 0; c < m.cols(); ++c) forward_inplace(m.col(c).data());
}

void Fft::inverse_cols(MatrixXcd& m) const {
  for (Eigen::Index c = 0; c < m.cols(); ++c) inverse_inplace(m.col(c).data());
}

MatrixXcd dft_matrix(int K) {
  MatrixXcd F(K, K);
  for (int n = 0; n < K; ++n)
    for (int m = 0; m < K; ++m)
      F(n, m) = std::polar(1.0, -2.0 * M_PI * n * m / K);
  return F;
}

}  // namespace gfdet

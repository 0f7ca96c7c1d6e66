#pragma once

#include "gfdet/types.hpp"

namespace gfdet {

/// One-dimensional DFT pair with the e^{-j 2pi/K} forward convention and
/// inverse = (1/K) F^H. The transform backend sits behind this interface;
/// callers only rely on the convention.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(Fft&& other) noexcept;
  Fft& operator=(Fft&& other) noexcept;
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }

  void forward_inplace(cxd* data) const;
  void inverse_inplace(cxd* data) const;

  VectorXcd forward(VectorXcd v) const;
  VectorXcd inverse(VectorXcd v) const;

  /// Column-wise transforms of an n x R matrix, in place.
  void forward_cols(MatrixXcd& m) const;
  void inverse_cols(MatrixXcd& m) const;

 private:
  int n_ = 0;
  void* fwd_ = nullptr;  // backend plan handles
  void* bwd_ = nullptr;
};

/// Explicit DFT matrix F_K, (n,m) entry e^{-j 2pi (n-1)(m-1) / K}. Test oracle
/// and reference path for the operator identities.
MatrixXcd dft_matrix(int K);

}  // namespace gfdet

#pragma once

// Unitary 2D DFT on complex nx-by-ny matrices, backed by FFTW with cached plans.

#include <Eigen/Dense>

namespace shgs {

/// X(p,q) = (nx ny)^{-1/2} sum x(a,b) exp(-2 pi i (p a / nx + q b / ny)).
Eigen::MatrixXcd fft2(const Eigen::MatrixXcd& x);
Eigen::MatrixXcd ifft2(const Eigen::MatrixXcd& X);

/// Index i of an n-point DFT as a signed frequency in [-n/2, n/2).
inline int signed_frequency(int i, int n) { return i < (n + 1) / 2 ? i : i - n; }
/// Inverse of signed_frequency.
inline int frequency_index(int f, int n) { return f < 0 ? f + n : f; }

} // namespace shgs

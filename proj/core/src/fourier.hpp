#pragma once

#include <complex>
#include <span>
#include <vector>

namespace mcflab::detail {

// Thin wrapper over FFTW real transforms. Plans are cached per size; the
// cache is guarded because FFTW planning is not thread safe, execution is.

/// Unnormalized forward transform: out[k] = sum_j in[j] exp(-2 pi i j k / m),
/// k = 0 .. m/2.
std::vector<std::complex<double>> forward(std::span<const double> in);

/// Unnormalized inverse of `forward` (result is m times the original).
std::vector<double> inverse(std::span<const std::complex<double>> spectrum, int m);

}  // namespace mcflab::detail

// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// Data-parallel inner loops. Every kernel has a portable scalar reference
// and, where the build and CPU allow it, an AVX2/FMA variant. The variant
// is picked once at first use; set EDGEPROBE_SIMD=scalar to force the
// reference path.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace edgeprobe::kernels {

struct KernelTable {
  const char* name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // dst[w] |= src[w]
  void (*bits_or)(std::uint64_t* dst, const std::uint64_t* src, std::size_t words);
  // true iff (a[w] & b[w]) != 0 for some w
  bool (*bits_intersect)(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
};

const KernelTable& scalar_kernels();

// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

// The table used by the rest of the library.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

// y = W x + b for a row-major rows x cols matrix.
void matvec(std::span<const double> weight, std::span<const double> bias,
            std::span<const double> x, std::span<double> y);

// x_grad += W^T y_grad
void matvec_transposed_accumulate(std::span<const double> weight,
                                  std::span<const double> y_grad,
                                  std::span<double> x_grad);

// W_grad += y_grad x^T
void outer_accumulate(std::span<const double> y_grad, std::span<const double> x,
                      std::span<double> weight_grad);

}  // namespace edgeprobe::kernels

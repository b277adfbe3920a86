// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <string_view>

#include "edgeprobe/error.hpp"
#include "kernels_internal.hpp"

namespace edgeprobe::kernels {

const KernelTable& scalar_kernels() { return detail::kScalarTable; }

const KernelTable* avx2_kernels() {
#if defined(EDGEPROBE_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* env = std::getenv("EDGEPROBE_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    const KernelTable* simd = avx2_kernels();
    return simd != nullptr ? *simd : scalar_kernels();
  }();
  return table;
}

void matvec(std::span<const double> weight, std::span<const double> bias,
            std::span<const double> x, std::span<double> y) {
  const std::size_t rows = y.size();
  const std::size_t cols = x.size();
  if (weight.size() != rows * cols || bias.size() != rows) {
    throw ShapeError("matvec: weight/bias shape does not match vectors");
  }
  const KernelTable& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = bias[r] + k.dot(weight.data() + r * cols, x.data(), cols);
  }
}

void matvec_transposed_accumulate(std::span<const double> weight,
                                  std::span<const double> y_grad,
                                  std::span<double> x_grad) {
  const std::size_t rows = y_grad.size();
  const std::size_t cols = x_grad.size();
  if (weight.size() != rows * cols) {
    throw ShapeError("matvec_transposed_accumulate: shape mismatch");
  }
  const KernelTable& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    if (y_grad[r] != 0.0) k.axpy(y_grad[r], weight.data() + r * cols, x_grad.data(), cols);
  }
}

void outer_accumulate(std::span<const double> y_grad, std::span<const double> x,
                      std::span<double> weight_grad) {
  const std::size_t rows = y_grad.size();
  const std::size_t cols = x.size();
  if (weight_grad.size() != rows * cols) throw ShapeError("outer_accumulate: shape mismatch");
  const KernelTable& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    if (y_grad[r] != 0.0) k.axpy(y_grad[r], x.data(), weight_grad.data() + r * cols, cols);
  }
}

}  // namespace edgeprobe::kernels

// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "edgeprobe/kernels/kernels.hpp"

namespace edgeprobe::kernels::detail {

extern const KernelTable kScalarTable;
#ifdef EDGEPROBE_WITH_AVX2
extern const KernelTable kAvx2Table;
#endif

}  // namespace edgeprobe::kernels::detail

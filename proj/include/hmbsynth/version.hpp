// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace hmbsynth {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hmbsynth

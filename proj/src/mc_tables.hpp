// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors
#pragma once

#include <array>
#include <cstdint>

namespace vizdpp::contour::tables {

extern const std::array<std::uint16_t, 256> kEdgeMask;
extern const std::array<std::array<std::int8_t, 16>, 256> kTriangles;

}  // namespace vizdpp::contour::tables

// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors
#pragma once

// Raw dataset format: a JSON descriptor
//
//   {"dims":[nx,ny,nz], "components":1|3, "dtype":"f32",
//    "origin":[ox,oy,oz], "spacing":[sx,sy,sz]}
//
// next to a headerless little-endian float32 file holding exactly
// nx*ny*nz*components values. The raw file shares the descriptor's stem with
// a ".raw" extension (volume.json -> volume.raw).

#include <filesystem>
#include <stdexcept>
#include <string>

#include "vizdpp/field.hpp"

namespace vizdpp {

class DatasetError : public std::runtime_error {
 public:
  enum class Kind { MissingFile, BadDescriptor, BadDtype, SizeMismatch, Io };

  DatasetError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::filesystem::path raw_path_for(const std::filesystem::path& descriptor);

StructuredField load_field(const std::filesystem::path& descriptor);
void save_field(const StructuredField& field, const std::filesystem::path& descriptor);

}  // namespace vizdpp

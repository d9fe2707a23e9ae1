// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include "vizdpp/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"

namespace vizdpp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

void to_little_endian_in_place(std::vector<float>& values) {
  if constexpr (std::endian::native == std::endian::big) {
    for (float& f : values) f = std::bit_cast<float>(byteswap32(std::bit_cast<std::uint32_t>(f)));
  }
}

Vec3 read_vec3(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 3) {
    throw DatasetError(DatasetError::Kind::BadDescriptor,
                       std::string("descriptor key '") + key + "' must be a 3-array");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

}  // namespace

fs::path raw_path_for(const fs::path& descriptor) {
  fs::path raw = descriptor;
  raw.replace_extension(".raw");
  return raw;
}

StructuredField load_field(const fs::path& descriptor) {
  std::ifstream in(descriptor);
  if (!in) {
    throw DatasetError(DatasetError::Kind::MissingFile,
                       "cannot open descriptor " + descriptor.string());
  }

  Dims dims;
  int components = 0;
  Vec3 origin{};
  Vec3 spacing{};
  try {
    const json j = json::parse(in);
    const json& d = j.at("dims");
    if (!d.is_array() || d.size() != 3) {
      throw DatasetError(DatasetError::Kind::BadDescriptor, "'dims' must be a 3-array");
    }
    dims = {d[0].get<Index>(), d[1].get<Index>(), d[2].get<Index>()};
    components = j.at("components").get<int>();
    const auto dtype = j.at("dtype").get<std::string>();
    if (dtype != "f32") {
      throw DatasetError(DatasetError::Kind::BadDtype, "unsupported dtype '" + dtype + "'");
    }
    origin = read_vec3(j, "origin");
    spacing = read_vec3(j, "spacing");
  } catch (const json::exception& e) {
    throw DatasetError(DatasetError::Kind::BadDescriptor,
                       "malformed descriptor " + descriptor.string() + ": " + e.what());
  }
  if (components != 1 && components != 3) {
    throw DatasetError(DatasetError::Kind::BadDescriptor, "'components' must be 1 or 3");
  }
  try {
    dims.validate();
  } catch (const std::invalid_argument& e) {
    throw DatasetError(DatasetError::Kind::BadDescriptor, e.what());
  }

  const fs::path raw = raw_path_for(descriptor);
  std::error_code ec;
  const auto bytes = fs::file_size(raw, ec);
  if (ec) throw DatasetError(DatasetError::Kind::MissingFile, "cannot open raw file " + raw.string());

  const auto count = static_cast<std::uintmax_t>(dims.points() * components);
  if (bytes != count * sizeof(float)) {
    throw DatasetError(DatasetError::Kind::SizeMismatch,
                       raw.string() + " holds " + std::to_string(bytes) + " bytes, expected " +
                           std::to_string(count * sizeof(float)));
  }

  std::vector<float> values(static_cast<std::size_t>(count));
  std::ifstream rin(raw, std::ios::binary);
  if (!rin.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(bytes))) {
    throw DatasetError(DatasetError::Kind::Io, "short read on " + raw.string());
  }
  to_little_endian_in_place(values);

  try {
    return StructuredField(dims, components, origin, spacing, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw DatasetError(DatasetError::Kind::BadDescriptor, e.what());
  }
}

void save_field(const StructuredField& field, const fs::path& descriptor) {
  const Dims& d = field.dims();
  const json j = {{"dims", {d.nx, d.ny, d.nz}},
                  {"components", field.components()},
                  {"dtype", "f32"},
                  {"origin", field.origin()},
                  {"spacing", field.spacing()}};
  std::ofstream out(descriptor);
  if (!out) throw DatasetError(DatasetError::Kind::Io, "cannot write " + descriptor.string());
  out << j.dump(2) << '\n';

  std::vector<float> values(field.values().begin(), field.values().end());
  to_little_endian_in_place(values);
  const fs::path raw = raw_path_for(descriptor);
  std::ofstream rout(raw, std::ios::binary);
  if (!rout.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size() * sizeof(float)))) {
    throw DatasetError(DatasetError::Kind::Io, "cannot write " + raw.string());
  }
}

}  // namespace vizdpp

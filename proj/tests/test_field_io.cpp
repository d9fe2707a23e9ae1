// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include <doctest.h>

#include <cstring>
#include <fstream>

#include "vizdpp/field_io.hpp"

using namespace vizdpp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "vizdpp_field_io";
  fs::create_directories(dir);
  return dir / name;
}

void write_descriptor(const fs::path& p, const std::string& json) {
  std::ofstream(p) << json;
}

void write_raw(const fs::path& p, const std::vector<float>& values, std::size_t drop_bytes = 0) {
  std::vector<char> bytes(values.size() * 4);
  std::memcpy(bytes.data(), values.data(), bytes.size());
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - drop_bytes));
}

DatasetError::Kind kind_of(const fs::path& p) {
  try {
    load_field(p);
  } catch (const DatasetError& e) {
    return e.kind();
  }
  FAIL("load_field did not throw");
  return DatasetError::Kind::Io;
}

const char* k2x2 =
    R"({"dims":[2,2,1],"components":1,"dtype":"f32","origin":[0,0,0],"spacing":[1,1,1]})";

}  // namespace

TEST_SUITE("field_io") {

TEST_CASE("raw path sits next to the descriptor") {
  CHECK(raw_path_for("/a/b/vol.json") == fs::path("/a/b/vol.raw"));
}

TEST_CASE("2x2 file loads as written") {
  const auto desc = scratch("small.json");
  write_descriptor(desc, k2x2);
  write_raw(raw_path_for(desc), {1, 2, 3, 4});
  const auto f = load_field(desc);
  CHECK(f.dims() == Dims{2, 2, 1});
  CHECK(f.components() == 1);
  CHECK(std::vector<float>(f.values().begin(), f.values().end()) == std::vector<float>{1, 2, 3, 4});
}

TEST_CASE("distinct errors") {
  SUBCASE("missing descriptor") { CHECK(kind_of(scratch("nope.json")) == DatasetError::Kind::MissingFile); }
  SUBCASE("missing raw") {
    const auto desc = scratch("noraw.json");
    write_descriptor(desc, k2x2);
    fs::remove(raw_path_for(desc));
    CHECK(kind_of(desc) == DatasetError::Kind::MissingFile);
  }
  SUBCASE("one byte short") {
    const auto desc = scratch("short.json");
    write_descriptor(desc, k2x2);
    write_raw(raw_path_for(desc), {1, 2, 3, 4}, 1);
    CHECK(kind_of(desc) == DatasetError::Kind::SizeMismatch);
  }
  SUBCASE("bad dtype") {
    const auto desc = scratch("f64.json");
    write_descriptor(desc, R"({"dims":[2,2,1],"components":1,"dtype":"f64"})");
    write_raw(raw_path_for(desc), {1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(kind_of(desc) == DatasetError::Kind::BadDtype);
  }
  SUBCASE("malformed json") {
    const auto desc = scratch("broken.json");
    write_descriptor(desc, "{\"dims\": [2,2");
    CHECK(kind_of(desc) == DatasetError::Kind::BadDescriptor);
  }
  SUBCASE("bad components") {
    const auto desc = scratch("comp.json");
    write_descriptor(desc, R"({"dims":[2,2,1],"components":2,"dtype":"f32"})");
    CHECK(kind_of(desc) == DatasetError::Kind::BadDescriptor);
  }
}

TEST_CASE("save then load round-trips") {
  const auto f = gen_sphere_field({7, 6, 5}, {3, 2.5, 2}, 2.0, {1, 2, 3}, {0.5, 0.25, 2});
  const auto desc = scratch("sphere.json");
  save_field(f, desc);
  const auto g = load_field(desc);
  CHECK(g.dims() == f.dims());
  CHECK(g.origin() == f.origin());
  CHECK(g.spacing() == f.spacing());
  CHECK(std::equal(f.values().begin(), f.values().end(), g.values().begin(), g.values().end()));
  CHECK(fs::file_size(raw_path_for(desc)) == 7 * 6 * 5 * 4);

  const auto v = gen_rotational_field({4, 4, 3}, 0.5);
  save_field(v, scratch("rot.json"));
  const auto w = load_field(scratch("rot.json"));
  CHECK(w.components() == 3);
  CHECK(std::equal(v.values().begin(), v.values().end(), w.values().begin(), w.values().end()));
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "scn/distance_matrix.hpp"
#include "scn/error.hpp"
#include "scn/io.hpp"
#include "scn/tensor.hpp"
#include "test_util.hpp"

using namespace scn;
using testutil::TempDir;

namespace {

void write_manifest(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream(path) << doc.dump();
}

std::vector<unsigned char> u16_le(const std::vector<unsigned>& labels) {
  std::vector<unsigned char> out;
  for (unsigned l : labels) {
    out.push_back(static_cast<unsigned char>(l & 0xff));
    out.push_back(static_cast<unsigned char>(l >> 8));
  }
  return out;
}

}  // namespace

TEST_CASE("shapes and points validate their invariants") {
  CHECK(make_shape(32, 32, 3).elements() == 3072);
  CHECK_THROWS_AS(make_shape(0, 2, 1), UsageError);
  CHECK_THROWS_AS(DataPoint(make_shape(1, 2, 1), {0.5f}), DataError);
  CHECK_THROWS_AS(DataPoint(make_shape(1, 1, 1), {std::numeric_limits<float>::quiet_NaN()}), DataError);

  const DataPoint p(make_shape(2, 2, 2), {0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(p.at(1, 0, 1) == 5.0f);
  CHECK(p.at(0, 1, 0) == 2.0f);
}

TEST_CASE("samples reject label and shape mismatches") {
  const auto s = make_shape(1, 2, 1);
  CHECK_THROWS_WITH_AS(Sample({DataPoint(s, {0, 1})}, {0, 1}), doctest::Contains("label count mismatch"), DataError);
  CHECK_THROWS_AS(Sample({DataPoint(s, {0, 1}), DataPoint(make_shape(2, 1, 1), {0, 1})}, {0, 0}), DataError);
  CHECK_THROWS_AS(Sample({}, {}), DataError);

  const Sample sample({DataPoint(s, {0, 1}), DataPoint(s, {1, 1}), DataPoint(s, {2, 1})}, {0, 1, 0});
  CHECK(sample.ids() == std::vector<std::size_t>{0, 1, 2});
  const std::vector<std::size_t> keep{2, 0};
  const Sample sub = sample.subset(keep);
  CHECK(sub.ids() == std::vector<std::size_t>{2, 0});
  CHECK(sub.labels() == std::vector<Label>{0, 0});
  CHECK(sub.point(0) == sample.point(2));
}

TEST_CASE("euclidean distance accumulates in double precision") {
  std::vector<float> a(3072, 0.0f), b(3072, 1.0f / 3.0f);
  double expected = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) expected += double(b[i]) * double(b[i]);
  CHECK(euclidean_distance(a, b) == doctest::Approx(std::sqrt(expected)).epsilon(1e-15));
  const std::vector<float> x{1.0f, 0.0f}, y{3.0f, 4.0f};
  CHECK(euclidean_distance(x, y) == doctest::Approx(std::sqrt(20.0)).epsilon(1e-15));
}

TEST_CASE("manifest with 8-bit records scales bytes to [0,1]") {
  TempDir dir("manifest");
  testutil::write_bytes(dir / "rec.bin", {0, 255, 51, 102, 255, 0, 0, 255});
  testutil::write_bytes(dir / "lab.bin", u16_le({3, 258}));
  write_manifest(dir / "m.json", {{"shape", {2, 2, 1}}, {"dtype", "u8"}, {"records", "rec.bin"}, {"labels", "lab.bin"}});

  const Sample s = load_manifest(dir / "m.json");
  REQUIRE(s.size() == 2);
  CHECK(s.shape() == make_shape(2, 2, 1));
  CHECK(s.point(0).values()[0] == 0.0f);
  CHECK(s.point(0).values()[1] == 1.0f);
  CHECK(s.point(0).values()[2] == doctest::Approx(0.2));
  CHECK(s.labels() == std::vector<Label>{3, 258});

  SUBCASE("two loads compare equal") { CHECK(load_manifest(dir / "m.json") == s); }

  SUBCASE("wrong label count") {
    testutil::write_bytes(dir / "lab.bin", u16_le({1, 2, 3}));
    CHECK_THROWS_WITH_AS(load_manifest(dir / "m.json"), doctest::Contains("label count mismatch"), DataError);
  }

  SUBCASE("record file not a multiple of the record size") {
    testutil::write_bytes(dir / "rec.bin", {0, 1, 2, 3, 4});
    CHECK_THROWS_AS(load_manifest(dir / "m.json"), DataError);
  }

  SUBCASE("missing records file") {
    std::filesystem::remove(dir / "rec.bin");
    CHECK_THROWS_WITH_AS(load_manifest(dir / "m.json"), doctest::Contains("rec.bin"), DataError);
  }
}

TEST_CASE("manifest with f32 records and out-of-range or bad declarations") {
  TempDir dir("manifest32");
  const std::vector<float> vals{0.25f, 0.5f, 0.75f};
  std::ofstream(dir / "rec.bin", std::ios::binary).write(reinterpret_cast<const char*>(vals.data()), 12);
  testutil::write_bytes(dir / "lab.bin", u16_le({7}));
  write_manifest(dir / "m.json", {{"shape", {1, 3, 1}}, {"dtype", "f32"}, {"records", "rec.bin"}, {"labels", "lab.bin"}});
  const Sample s = load_manifest(dir / "m.json");
  CHECK(std::vector<float>(s.point(0).values().begin(), s.point(0).values().end()) == vals);

  write_manifest(dir / "bad.json", {{"shape", {1, 3}}, {"dtype", "f32"}, {"records", "rec.bin"}, {"labels", "lab.bin"}});
  CHECK_THROWS_AS(load_manifest(dir / "bad.json"), DataError);
  write_manifest(dir / "bad2.json", {{"shape", {1, 3, 1}}, {"dtype", "f64"}, {"records", "rec.bin"}, {"labels", "lab.bin"}});
  CHECK_THROWS_AS(load_manifest(dir / "bad2.json"), DataError);
  CHECK_THROWS_AS(load_manifest(dir / "absent.json"), DataError);
}

TEST_CASE("manifest round trip preserves values at stored precision") {
  TempDir dir("roundtrip");
  SUBCASE("8-bit exact values") {
    const auto s = make_shape(2, 2, 3);
    std::vector<DataPoint> pts;
    std::mt19937 rng(1);
    for (int i = 0; i < 4; ++i) {
      std::vector<float> v(s.elements());
      for (auto& x : v) x = static_cast<float>(rng() % 256) / 255.0f;
      pts.emplace_back(s, v);
    }
    const Sample sample(pts, {0, 1, 2, 65535});
    save_manifest(sample, dir / "a.json");
    CHECK(parse_manifest(dir / "a.json").dtype == PixelType::u8);
    CHECK(load_manifest(dir / "a.json") == sample);
  }
  SUBCASE("arbitrary floats") {
    const Sample sample = testutil::random_sample(5, make_shape(3, 2, 1), 2, 9);
    save_manifest(sample, dir / "b.json");
    CHECK(parse_manifest(dir / "b.json").dtype == PixelType::f32);
    CHECK(load_manifest(dir / "b.json") == sample);
  }
}

TEST_CASE("CIFAR-10 batch loader agrees with a byte-level reader") {
  TempDir dir("cifar");
  std::mt19937 rng(42);
  std::vector<unsigned char> bytes(3 * kCifarRecordBytes);
  for (auto& b : bytes) b = static_cast<unsigned char>(rng() & 0xff);
  for (std::size_t r = 0; r < 3; ++r) bytes[r * kCifarRecordBytes] = static_cast<unsigned char>(r * 4 + 1);
  testutil::write_bytes(dir / "batch.bin", bytes);

  const Sample s = load_cifar_batch(dir / "batch.bin");
  REQUIRE(s.size() == 3);
  CHECK(s.shape() == make_shape(32, 32, 3));
  for (std::size_t r = 0; r < 3; ++r) {
    const auto rec = oracle::read_cifar_record((dir / "batch.bin").string(), r);
    CHECK(s.labels()[r] == rec.label);
    const DataPoint& p = s.point(r);
    for (std::size_t row = 0; row < 32; ++row)
      for (std::size_t col = 0; col < 32; ++col) {
        const std::size_t k = row * 32 + col;
        REQUIRE(p.at(row, col, 0) == static_cast<float>(rec.red[k]) / 255.0f);
        REQUIRE(p.at(row, col, 1) == static_cast<float>(rec.green[k]) / 255.0f);
        REQUIRE(p.at(row, col, 2) == static_cast<float>(rec.blue[k]) / 255.0f);
      }
  }

  SUBCASE("batches concatenate with running ids") {
    const Sample two = load_cifar_batches({dir / "batch.bin", dir / "batch.bin"});
    CHECK(two.size() == 6);
    CHECK(two.ids()[4] == 4);
    CHECK(two.point(4) == s.point(1));
  }
  SUBCASE("truncated batch") {
    bytes.pop_back();
    testutil::write_bytes(dir / "short.bin", bytes);
    CHECK_THROWS_AS(load_cifar_batch(dir / "short.bin"), DataError);
  }
}

TEST_CASE("distance matrix files round-trip bit-exactly") {
  TempDir dir("dm");
  std::mt19937_64 rng(7);
  const DistanceMatrix m = testutil::random_distance_matrix(3, 0.0, 1e3, rng);
  save_distance_matrix(m, dir / "m.bin");
  CHECK(std::filesystem::file_size(dir / "m.bin") == 8 + 9 * 8);
  const DistanceMatrix back = load_distance_matrix(dir / "m.bin");
  CHECK(back == m);

  SUBCASE("1x1 zero matrix") {
    save_distance_matrix(DistanceMatrix(1), dir / "one.bin");
    CHECK(load_distance_matrix(dir / "one.bin").size() == 1);
  }
  SUBCASE("header n=4 with 15 values") {
    std::vector<unsigned char> bytes{4, 0, 0, 0, 0, 0, 0, 0};
    bytes.resize(8 + 15 * 8, 0);
    testutil::write_bytes(dir / "t.bin", bytes);
    CHECK_THROWS_AS(load_distance_matrix(dir / "t.bin"), DataError);
  }
  SUBCASE("short header") {
    testutil::write_bytes(dir / "h.bin", {1, 0, 0});
    CHECK_THROWS_AS(load_distance_matrix(dir / "h.bin"), DataError);
  }
  SUBCASE("non-symmetric save refused") {
    DistanceMatrix bad(2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(save_distance_matrix(bad, dir / "bad.bin"), DataError);
  }
  SUBCASE("nonzero diagonal or negative entries rejected on validate") {
    DistanceMatrix d(2);
    d(0, 0) = 1.0;
    CHECK_THROWS_AS(d.validate(), DataError);
    DistanceMatrix neg(2);
    neg.set_symmetric(0, 1, -1.0);
    CHECK_THROWS_AS(neg.validate(), DataError);
  }
}

TEST_CASE("precomputed orbit manifests") {
  TempDir dir("orbits");
  const auto shape = make_shape(1, 2, 1);
  testutil::write_bytes(dir / "v0.u8", {0, 255});
  const std::vector<float> f{0.5f, 0.25f};
  std::ofstream(dir / "v1.f32", std::ios::binary).write(reinterpret_cast<const char*>(f.data()), 8);
  write_manifest(dir / "o.json", {{"3", {"v0.u8", "v1.f32"}}});

  const auto table = PrecomputedOrbits::load(dir / "o.json");
  CHECK(table.records() == 1);
  const auto views = table.views(3, shape);
  REQUIRE(views.size() == 2);
  CHECK(views[0].values()[1] == 1.0f);
  CHECK(views[1].values()[0] == 0.5f);
  CHECK_THROWS_AS(table.views(0, shape), DataError);
  CHECK_THROWS_AS(table.views(3, make_shape(1, 3, 1)), DataError);

  write_manifest(dir / "bad.json", {{"x", {"v0.u8"}}});
  CHECK_THROWS_AS(PrecomputedOrbits::load(dir / "bad.json"), DataError);
}

TEST_CASE("numeric CSV reader") {
  TempDir dir("csv");
  std::ofstream(dir / "a.csv") << "1, 2.5,-3\n4,5e-1,6\n";
  const auto rows = read_numeric_csv(dir / "a.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<double>{1, 2.5, -3});
  CHECK(rows[1][1] == 0.5);
  std::ofstream(dir / "b.csv") << "1,x\n";
  CHECK_THROWS_WITH_AS(read_numeric_csv(dir / "b.csv"), doctest::Contains(":1:"), DataError);
}

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "bpm/common/error.hpp"
#include "bpm/common/hash.hpp"
#include "bpm/common/random.hpp"
#include "bpm/common/text.hpp"
#include "bpm/simd/kernels.hpp"

using namespace bpm;

TEST_CASE("strict numeric parsing") {
  CHECK(parse_double(" 1.5 ") == 1.5);
  CHECK_FALSE(parse_double("1.5x").has_value());
  CHECK_FALSE(parse_double("").has_value());
  CHECK(parse_int("42") == 42);
  CHECK_FALSE(parse_int("4.2").has_value());
}

TEST_CASE("format_double round-trips") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal(0.0, 1e6);
    CHECK(*parse_double(format_double(v)) == v);
  }
}

TEST_CASE("csv escape and record parsing agree") {
  const std::vector<std::string> fields{"plain", "a,b", "say \"hi\"", ""};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(fields[i]);
  }
  CHECK(parse_csv_record(line) == fields);
  CHECK_THROWS_AS(parse_csv_record("\"open"), DataError);
}

TEST_CASE("split helpers") {
  CHECK(split_list(" a, b ,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_view("a||b", '|').size() == 3);
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  Sha256 h;
  h.update("a", 1);
  h.update("bc", 2);
  CHECK(h.hex_digest() == sha256_hex("abc"));
}

TEST_CASE("rng is reproducible and seeds split by tag") {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(derive_seed(1, "x") == derive_seed(1, "x"));
  CHECK(derive_seed(1, "x") != derive_seed(1, "y"));
  CHECK(derive_seed(1, "x") != derive_seed(2, "x"));
  // FNV-1a 64 offset basis for the empty string.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
}

TEST_CASE("rng distributions stay in range") {
  Rng rng(11);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    const auto k = rng.below(7);
    CHECK(k < 7);
    seen.insert(k);
  }
  CHECK(seen.size() == 7);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

namespace {

double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  Rng rng(5);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u}) {
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal();
    CHECK(simd::scalar::dot(a.data(), b.data(), n) == doctest::Approx(naive_dot(a, b)).epsilon(1e-12));
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK(simd::scalar::squared_distance(a.data(), b.data(), n) == doctest::Approx(d2).epsilon(1e-12));
  }
}

TEST_CASE("vector backends agree with the scalar reference") {
  Rng rng(17);
  for (auto backend : {simd::Backend::Avx2, simd::Backend::Neon}) {
    if (!simd::backend_available(backend)) {
      CHECK_THROWS_AS(simd::kernels_for(backend), Error);
      continue;
    }
    const auto& k = simd::kernels_for(backend);
    CHECK(k.backend == backend);
    for (std::size_t n = 0; n < 70; ++n) {
      std::vector<double> a(n), b(n), y1(n), y2(n);
      for (auto& v : a) v = rng.normal(0, 10);
      for (auto& v : b) v = rng.normal(0, 10);
      for (std::size_t i = 0; i < n; ++i) y1[i] = y2[i] = rng.normal();
      double scale = 1.0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]) + (a[i] - b[i]) * (a[i] - b[i]);
      CHECK(std::abs(k.dot(a.data(), b.data(), n) - simd::scalar::dot(a.data(), b.data(), n)) <= 1e-12 * scale);
      CHECK(std::abs(k.squared_distance(a.data(), b.data(), n) -
                     simd::scalar::squared_distance(a.data(), b.data(), n)) <= 1e-12 * scale);
      k.axpy(0.37, a.data(), y1.data(), n);
      simd::scalar::axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("backend selection and override") {
  CHECK(simd::backend_available(simd::Backend::Scalar));
  CHECK(simd::parse_backend("scalar") == simd::Backend::Scalar);
  CHECK_THROWS(simd::parse_backend("sse9"));
  const auto before = simd::active_backend();
  {
    simd::ScopedBackend scoped(simd::Backend::Scalar);
    CHECK(simd::active_backend() == simd::Backend::Scalar);
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    CHECK(simd::dot(a, b) == 32.0);
  }
  CHECK(simd::active_backend() == before);
}

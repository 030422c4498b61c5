#include <doctest.h>

#include <cmath>

#include "hcrbound/rng.hpp"
#include "hcrbound/tensor.hpp"
#include "oracles.hpp"

using namespace hcrbound;

TEST_CASE("euclidean_norm basics") {
  CHECK(euclidean_norm(zeros({3})) == 0.0);
  CHECK(euclidean_norm(from_data({2}, {3.0, 4.0})) == doctest::Approx(5.0));
}

TEST_CASE("euclidean_norm matches extended-precision oracle") {
  RngStream rng(7, 1);
  Tensor v = sample_normal(rng, {100}, 1.0);
  long double ref = oracle::norm_longdouble(v.data);
  CHECK(std::fabs(euclidean_norm(v) - static_cast<double>(ref)) <=
        1e-12 * static_cast<double>(ref));
}

TEST_CASE("norm homogeneity and Cauchy-Schwarz") {
  RngStream rng(11, 0);
  for (int rep = 0; rep < 20; ++rep) {
    Tensor v = sample_normal(rng, {37}, 2.0);
    Tensor u = sample_normal(rng, {37}, 0.3);
    double c = 10.0 * (rng.next_uniform() - 0.5);
    CHECK(euclidean_norm(scale(v, c)) ==
          doctest::Approx(std::fabs(c) * euclidean_norm(v)).epsilon(1e-12));
    CHECK(dot(u, v) == doctest::Approx(dot(v, u)));
    CHECK(std::fabs(dot(u, v)) <=
          euclidean_norm(u) * euclidean_norm(v) * (1.0 + 1e-12));
  }
}

TEST_CASE("tensor plumbing: shapes, reshape, axpy") {
  Tensor t = from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor r = reshape(t, {3, 2});
  CHECK(r.data == t.data);
  CHECK_THROWS(reshape(t, {4, 2}));
  CHECK_THROWS(from_data({2, 2}, {1.0}));
  Tensor y = zeros({6});
  axpy(2.0, reshape(t, {6}), y);
  CHECK(y[5] == 12.0);
  CHECK_THROWS(add(t, reshape(t, {6})));
}

TEST_CASE("rng determinism across stream reconstruction") {
  RngStream a(42, 1234), b(42, 1234);
  Tensor ta = sample_normal(a, {50}, 1.0);
  Tensor tb = sample_normal(b, {50}, 1.0);
  CHECK(ta.data == tb.data);  // bit identical

  RngStream c(42, 1235);
  Tensor tc = sample_normal(c, {50}, 1.0);
  CHECK(ta.data != tc.data);
}

TEST_CASE("sample_normal moments and scaling") {
  RngStream rng(3, 9);
  const std::size_t n = 1'000'000;
  Tensor t = sample_normal(rng, {n}, 1.0);
  double mean = 0.0, ss = 0.0;
  for (double v : t.data) mean += v;
  mean /= static_cast<double>(n);
  for (double v : t.data) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(sd == doctest::Approx(1.0).epsilon(0.01));

  RngStream r1(5, 5), r2(5, 5);
  Tensor s1 = sample_normal(r1, {100}, 1.0);
  Tensor s2 = sample_normal(r2, {100}, 2.0);
  for (std::size_t i = 0; i < 100; ++i) CHECK(s2[i] == 2.0 * s1[i]);

  CHECK_THROWS(sample_normal(rng, {3}, 0.0));
  CHECK_THROWS(sample_normal(rng, {3}, -1.0));
}

TEST_CASE("sample_rademacher support, mean, determinism") {
  RngStream rng(17, 2);
  const std::size_t n = 1'000'000;
  Tensor t = sample_rademacher(rng, {n});
  double mean = 0.0;
  for (double v : t.data) {
    CHECK((v == 1.0 || v == -1.0));
    mean += v;
  }
  mean /= static_cast<double>(n);
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));

  RngStream a(9, 8), b(9, 8);
  CHECK(sample_rademacher(a, {64}).data == sample_rademacher(b, {64}).data);
}

TEST_CASE("substreams are independent of parent consumption") {
  RngStream parent(1, 2);
  RngStream s1 = parent.substream(5);
  parent.next_u64();
  RngStream s2 = parent.substream(5);
  CHECK(s1.next_u64() == s2.next_u64());
}

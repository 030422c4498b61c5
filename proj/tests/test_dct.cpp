#include <doctest.h>

#include <cmath>

#include "hcrbound/dct.hpp"
#include "hcrbound/rng.hpp"
#include "oracles.hpp"

using namespace hcrbound;

TEST_CASE("constant image concentrates in the DC mode") {
  Tensor img({1, 4, 4});
  for (double& v : img.data) v = 1.0;
  Tensor c = dct2(img);
  CHECK(c[0] == doctest::Approx(4.0).epsilon(1e-12));
  for (std::size_t i = 1; i < c.size(); ++i)
    CHECK(std::fabs(c[i]) < 1e-12);
}

TEST_CASE("DC delta inverts to a constant image") {
  Tensor c({1, 3, 5});
  c[0] = std::sqrt(15.0);
  Tensor img = idct2(c);
  for (double v : img.data) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("round-trip, Parseval, orthonormality") {
  RngStream rng(21, 0);
  for (int rep = 0; rep < 10; ++rep) {
    Tensor x = sample_normal(rng, {2, 7, 5}, 1.0);
    Tensor y = sample_normal(rng, {2, 7, 5}, 1.0);
    Tensor cx = dct2(x), cy = dct2(y);
    Tensor back = idct2(cx);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
    CHECK(euclidean_norm(cx) ==
          doctest::Approx(euclidean_norm(x)).epsilon(1e-12));
    CHECK(dot(cx, cy) == doctest::Approx(dot(x, y)).epsilon(1e-11));
  }
}

TEST_CASE("idct2 linearity") {
  RngStream rng(22, 0);
  Tensor x = sample_normal(rng, {1, 6, 6}, 1.0);
  Tensor y = sample_normal(rng, {1, 6, 6}, 1.0);
  Tensor lhs = idct2(add(scale(x, 2.5), scale(y, -0.75)));
  Tensor rhs = add(scale(idct2(x), 2.5), scale(idct2(y), -0.75));
  for (std::size_t i = 0; i < lhs.size(); ++i)
    CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
}

TEST_CASE("matches brute-force cosine sum on all sizes up to 8x8") {
  RngStream rng(23, 0);
  for (std::size_t h = 1; h <= 8; ++h) {
    for (std::size_t w = 1; w <= 8; ++w) {
      Tensor x = sample_normal(rng, {1, h, w}, 1.0);
      Tensor c = dct2(x);
      auto ref = oracle::dct2_bruteforce(x.data, h, w);
      for (std::size_t i = 0; i < c.size(); ++i)
        CHECK(std::fabs(c[i] - ref[i]) < 1e-10);
    }
  }
}

TEST_CASE("lowpass filter") {
  RngStream rng(24, 0);
  Tensor x = sample_normal(rng, {1, 6, 6}, 1.0);
  Tensor c = dct2(x);

  Tensor full = lowpass_filter(c, 6);
  CHECK(full.data == c.data);

  Tensor dc = lowpass_filter(c, 1);
  CHECK(dc[0] == c[0]);
  for (std::size_t i = 1; i < dc.size(); ++i) CHECK(dc[i] == 0.0);

  Tensor mid = lowpass_filter(c, 3);
  CHECK(euclidean_norm(mid) <= euclidean_norm(c) + 1e-15);
  CHECK_THROWS(lowpass_filter(c, 7));
  CHECK_THROWS(lowpass_filter(c, 0));
}

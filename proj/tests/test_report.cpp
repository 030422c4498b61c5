#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hcrbound/dct.hpp"
#include "hcrbound/report.hpp"
#include "test_helpers.hpp"

using namespace hcrbound;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct PgmImage {
  std::size_t w = 0, h = 0, channels = 0;
  std::vector<unsigned char> pixels;
};

// Minimal netpbm reader used only to round-trip write_image output.
PgmImage read_netpbm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::string magic;
  is >> magic;
  REQUIRE((magic == "P5" || magic == "P6"));
  PgmImage img;
  img.channels = magic == "P5" ? 1 : 3;
  std::size_t maxval = 0;
  is >> img.w >> img.h >> maxval;
  REQUIRE(maxval == 255);
  is.get();  // single whitespace byte after the header
  img.pixels.resize(img.w * img.h * img.channels);
  is.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  REQUIRE(is.gcount() == static_cast<std::streamsize>(img.pixels.size()));
  return img;
}

}  // namespace

TEST_CASE("histogram: degenerate and small exact cases") {
  Histogram single = histogram({2.5}, 3);
  CHECK(single.total == 1);
  CHECK(single.counts == std::vector<std::size_t>{1, 0, 0});
  CHECK(single.bin_edges.front() == doctest::Approx(2.5));
  CHECK(single.bin_edges.back() == doctest::Approx(3.5));

  Histogram h = histogram({0.0, 1.0, 2.0, 3.0}, 2);
  CHECK(h.counts == std::vector<std::size_t>{2, 2});
  CHECK(h.bin_edges == std::vector<double>{0.0, 1.5, 3.0});

  CHECK_THROWS(histogram({}, 4));
  CHECK_THROWS(histogram({1.0}, 0));
  CHECK_THROWS(histogram({std::nan("")}, 2));
}

TEST_CASE("histogram of uniform draws is statistically flat") {
  RngStream rng(91, 0);
  std::vector<double> vals(100'000);
  for (double& v : vals) v = rng.next_uniform();
  Histogram h = histogram(vals, 10);
  CHECK(h.total == vals.size());
  std::size_t sum = 0;
  double expected = 10'000.0;
  double five_sigma = 5.0 * std::sqrt(100'000.0 * 0.1 * 0.9);
  for (std::size_t c : h.counts) {
    sum += c;
    CHECK(std::fabs(static_cast<double>(c) - expected) < five_sigma);
  }
  CHECK(sum == h.total);
}

TEST_CASE("write_histogram_csv layout") {
  Histogram h = histogram({0.0, 1.0, 2.0, 3.0}, 2);
  std::string path = "hist_test.csv";
  write_histogram_csv(h, path);
  std::string text = slurp(path);
  CHECK(text == "bin_left,bin_right,count\n0,1.5,2\n1.5,3,2\n");
  std::remove(path.c_str());
}

TEST_CASE("rademacher_visualize: zero bounds round-trip the image") {
  RngStream data_rng(92, 0);
  Tensor img({1, 6, 6});
  for (double& v : img.data) v = 0.2 + 0.6 * data_rng.next_uniform();
  RngStream rng(92, 1);
  auto identity = [](const Tensor& t) { return t; };
  Tensor out = rademacher_visualize(img, zeros(img.shape), rng, identity);
  for (std::size_t i = 0; i < img.size(); ++i)
    CHECK(out[i] == doctest::Approx(img[i]).epsilon(1e-12));
}

TEST_CASE("rademacher_visualize: a DC-only bound shifts the image uniformly") {
  Tensor img({1, 4, 4});
  for (double& v : img.data) v = 0.5;
  Tensor bounds = zeros({1, 4, 4});
  bounds[0] = 0.4;  // DC mode
  RngStream rng(93, 0);
  RngStream probe = rng;
  Tensor sign = sample_rademacher(probe, bounds.shape);
  auto identity = [](const Tensor& t) { return t; };
  Tensor out = rademacher_visualize(img, bounds, rng, identity);
  // a DC coefficient delta of c adds c / sqrt(H*W) to every pixel
  double shift = sign[0] * 0.4 / 4.0;
  for (double v : out.data)
    CHECK(v == doctest::Approx(0.5 + shift).epsilon(1e-12));
}

TEST_CASE("rademacher_visualize clips into [0,1] and is deterministic") {
  RngStream data_rng(94, 0);
  Tensor img = testutil::random_tensor(data_rng, {1, 5, 5}, 0.3);
  Tensor bounds({1, 5, 5});
  for (double& v : bounds.data) v = 10.0;
  auto identity = [](const Tensor& t) { return t; };
  RngStream r1(94, 1), r2(94, 1);
  Tensor a = rademacher_visualize(img, bounds, r1, identity);
  Tensor b = rademacher_visualize(img, bounds, r2, identity);
  CHECK(a.data == b.data);
  for (double v : a.data) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  RngStream r3(94, 2);
  CHECK_THROWS(rademacher_visualize(img, zeros({1, 4, 4}), r3, identity));
}

TEST_CASE("rademacher_visualize applies the denormalizer before clipping") {
  Tensor img({1, 2, 2});
  for (double& v : img.data) v = -0.5;  // signed-normalized constant
  auto denorm = [](const Tensor& t) {
    Tensor out = t;
    for (double& v : out.data) v = (v + 1.0) / 2.0;
    return out;
  };
  RngStream rng(95, 0);
  Tensor out = rademacher_visualize(img, zeros(img.shape), rng, denorm);
  for (double v : out.data) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("write_image emits exact P5 bytes for a tiny image") {
  std::string path = "img_test.pgm";
  write_image(zeros({1, 2, 2}), path, ImageFormat::Pgm);
  std::string text = slurp(path);
  CHECK(text == std::string("P5\n2 2\n255\n\0\0\0\0", 15));

  Tensor ones({1, 2, 2});
  for (double& v : ones.data) v = 1.0;
  write_image(ones, path, ImageFormat::Pgm);
  text = slurp(path);
  CHECK(text == "P5\n2 2\n255\n\xff\xff\xff\xff");
  std::remove(path.c_str());
}

TEST_CASE("write_image round-trips through a reference reader") {
  RngStream rng(96, 0);
  Tensor img({1, 7, 5});
  for (double& v : img.data) v = rng.next_uniform();
  std::string path = "img_rt.pgm";
  write_image(img, path, ImageFormat::Pgm);
  PgmImage back = read_netpbm(path);
  CHECK(back.w == 5);
  CHECK(back.h == 7);
  for (std::size_t i = 0; i < img.size(); ++i)
    CHECK(std::fabs(img[i] - back.pixels[i] / 255.0) <= 0.5 / 255.0 + 1e-12);
  std::remove(path.c_str());
}

TEST_CASE("write_image interleaves PPM channels per pixel") {
  Tensor img({3, 1, 2});
  // channel-planar input: r = (10, 40), g = (20, 50), b = (30, 60) / 255
  double vals[6] = {10, 40, 20, 50, 30, 60};
  for (std::size_t i = 0; i < 6; ++i) img[i] = vals[i] / 255.0;
  std::string path = "img_test.ppm";
  write_image(img, path, ImageFormat::Ppm);
  std::string text = slurp(path);
  CHECK(text == std::string("P6\n2 1\n255\n") +
                    std::string("\x0a\x14\x1e\x28\x32\x3c", 6));
  std::remove(path.c_str());
}

TEST_CASE("write_image rejects bad pixels and mismatched formats") {
  Tensor img({1, 2, 2});
  img[0] = 1.5;
  CHECK_THROWS(write_image(img, "bad.pgm", ImageFormat::Pgm));
  CHECK_THROWS(write_image(zeros({1, 2, 2}), "bad.ppm", ImageFormat::Ppm));
  CHECK_THROWS(write_image(zeros({3, 2, 2}), "bad.pgm", ImageFormat::Pgm));
  CHECK_THROWS(write_image(zeros({4}), "bad.pgm", ImageFormat::Pgm));
}

// Independent reference implementations used only by tests. Everything here
// is deliberately naive (dense, loop-based, extended precision) so it shares
// no code path with the library it checks.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// ---- extended-precision summation ------------------------------------

inline long double norm_longdouble(const std::vector<double>& v) {
  long double acc = 0.0L;
  for (double x : v) acc += static_cast<long double>(x) * x;
  return sqrtl(acc);
}

// expm1 via long-double series, accurate for small arguments.
inline long double expm1_series(long double x) {
  long double term = x, sum = x;
  for (int k = 2; k < 64; ++k) {
    term *= x / k;
    sum += term;
    if (fabsl(term) < 1e-30L * fabsl(sum)) break;
  }
  return sum;
}

// ---- dense linear algebra --------------------------------------------

struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;  // row-major
  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

inline std::vector<double> matvec(const Matrix& m, const std::vector<double>& x) {
  std::vector<double> y(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) y[i] += m(i, j) * x[j];
  return y;
}

inline std::vector<double> matvec_t(const Matrix& m, const std::vector<double>& y) {
  std::vector<double> x(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) x[j] += m(i, j) * y[i];
  return x;
}

struct Svd {
  std::vector<double> s;  // descending
  Matrix u;               // rows x cols (thin)
  Matrix v;               // cols x cols
};

// One-sided Jacobi SVD; fine for the small dense problems in these tests.
inline Svd jacobi_svd(const Matrix& m) {
  std::size_t n = m.rows, p = m.cols;
  Matrix b = m;
  Matrix v(p, p);
  for (std::size_t i = 0; i < p; ++i) v(i, i) = 1.0;

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i + 1 < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          alpha += b(k, i) * b(k, i);
          beta += b(k, j) * b(k, j);
          gamma += b(k, i) * b(k, j);
        }
        if (std::fabs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        off += std::fabs(gamma);
        double zeta = (beta - alpha) / (2.0 * gamma);
        double t = (zeta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (std::size_t k = 0; k < n; ++k) {
          double bi = b(k, i), bj = b(k, j);
          b(k, i) = c * bi - s * bj;
          b(k, j) = s * bi + c * bj;
        }
        for (std::size_t k = 0; k < p; ++k) {
          double vi = v(k, i), vj = v(k, j);
          v(k, i) = c * vi - s * vj;
          v(k, j) = s * vi + c * vj;
        }
      }
    }
    if (off == 0.0) break;
  }

  Svd out;
  out.s.resize(p);
  out.u = Matrix(n, p);
  for (std::size_t j = 0; j < p; ++j) {
    double nj = 0.0;
    for (std::size_t k = 0; k < n; ++k) nj += b(k, j) * b(k, j);
    nj = std::sqrt(nj);
    out.s[j] = nj;
    if (nj > 0)
      for (std::size_t k = 0; k < n; ++k) out.u(k, j) = b(k, j) / nj;
  }
  // Sort descending, permuting U and V columns along.
  for (std::size_t i = 0; i + 1 < p; ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < p; ++j)
      if (out.s[j] > out.s[best]) best = j;
    if (best != i) {
      std::swap(out.s[i], out.s[best]);
      for (std::size_t k = 0; k < n; ++k) std::swap(out.u(k, i), out.u(k, best));
      for (std::size_t k = 0; k < p; ++k) std::swap(v(k, i), v(k, best));
    }
  }
  out.v = std::move(v);
  return out;
}

// Minimum-norm least-squares solution via the SVD.
inline std::vector<double> pinv_solve(const Matrix& m,
                                      const std::vector<double>& b) {
  Svd svd = jacobi_svd(m);
  double cutoff = svd.s.empty() ? 0.0 : svd.s[0] * 1e-12;
  std::vector<double> x(m.cols, 0.0);
  for (std::size_t j = 0; j < m.cols; ++j) {
    if (svd.s[j] <= cutoff) continue;
    double utb = 0.0;
    for (std::size_t k = 0; k < m.rows; ++k) utb += svd.u(k, j) * b[k];
    double coef = utb / svd.s[j];
    for (std::size_t k = 0; k < m.cols; ++k) x[k] += coef * svd.v(k, j);
  }
  return x;
}

// ---- brute-force signal transforms -----------------------------------

// DCT-II straight from the cosine-sum definition, O(N^4) for 2D.
inline std::vector<double> dct2_bruteforce(const std::vector<double>& x,
                                           std::size_t h, std::size_t w) {
  std::vector<double> out(h * w, 0.0);
  for (std::size_t kr = 0; kr < h; ++kr) {
    for (std::size_t kc = 0; kc < w; ++kc) {
      double cr = std::sqrt((kr == 0 ? 1.0 : 2.0) / static_cast<double>(h));
      double cc = std::sqrt((kc == 0 ? 1.0 : 2.0) / static_cast<double>(w));
      double acc = 0.0;
      for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c)
          acc += x[r * w + c] *
                 std::cos(std::numbers::pi * kr * (2.0 * r + 1.0) / (2.0 * h)) *
                 std::cos(std::numbers::pi * kc * (2.0 * c + 1.0) / (2.0 * w));
      out[kr * w + kc] = cr * cc * acc;
    }
  }
  return out;
}

// Naive nested-loop 2D convolution, stride 1, zero padding.
// x: (ic,h,w), weight: (oc,ic,kh,kw), bias: (oc).
inline std::vector<double> conv2d_bruteforce(
    const std::vector<double>& x, std::size_t ic, std::size_t h, std::size_t w,
    const std::vector<double>& weight, std::size_t oc, std::size_t kh,
    std::size_t kw, const std::vector<double>& bias, std::size_t pad = 0) {
  std::size_t oh = h + 2 * pad - kh + 1, ow = w + 2 * pad - kw + 1;
  std::vector<double> y(oc * oh * ow, 0.0);
  for (std::size_t o = 0; o < oc; ++o)
    for (std::size_t r = 0; r < oh; ++r)
      for (std::size_t c = 0; c < ow; ++c) {
        double acc = bias[o];
        for (std::size_t i = 0; i < ic; ++i)
          for (std::size_t a = 0; a < kh; ++a)
            for (std::size_t b = 0; b < kw; ++b) {
              std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(r + a) -
                                  static_cast<std::ptrdiff_t>(pad);
              std::ptrdiff_t cc = static_cast<std::ptrdiff_t>(c + b) -
                                  static_cast<std::ptrdiff_t>(pad);
              if (rr < 0 || cc < 0 || rr >= static_cast<std::ptrdiff_t>(h) ||
                  cc >= static_cast<std::ptrdiff_t>(w))
                continue;
              acc += weight[((o * ic + i) * kh + a) * kw + b] *
                     x[(i * h + rr) * w + cc];
            }
        y[(o * oh + r) * ow + c] = acc;
      }
  return y;
}

// Central finite difference of a vector function along direction v.
inline std::vector<double> central_difference(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    const std::vector<double>& x, const std::vector<double>& v, double h) {
  std::vector<double> xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] += h * v[i];
    xm[i] -= h * v[i];
  }
  std::vector<double> fp = f(xp), fm = f(xm);
  std::vector<double> d(fp.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (fp[i] - fm[i]) / (2.0 * h);
  return d;
}

}  // namespace oracle

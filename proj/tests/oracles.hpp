#pragma once

// Reference computations written without the library, for cross-checking.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

// d_j = n^-1/2 sum_{t=1..n} x_t exp(-2 pi i t j / n), angles from long double.
inline std::vector<std::complex<double>> dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    long double re = 0, im = 0;
    for (std::size_t t = 1; t <= n; ++t) {
      const std::size_t k = (t * j) % n;
      const long double ang = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) / n;
      re += x[t - 1] * std::cos(ang);
      im += x[t - 1] * std::sin(ang);
    }
    const long double s = 1.0L / std::sqrt(static_cast<long double>(n));
    out[j] = {static_cast<double>(re * s), static_cast<double>(im * s)};
  }
  return out;
}

inline std::vector<double> periodogram(const std::vector<double>& x) {
  const auto d = dft(x);
  const std::size_t n = x.size();
  std::vector<double> p;
  for (std::size_t j = 1; j <= (n - 1) / 2; ++j) p.push_back(4.0 / n * std::norm(d[j]));
  return p;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Dense row-major matrix for the elimination oracle.
struct Mat {
  std::size_t rows, cols;
  std::vector<double> a;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Solves A X = B by Gaussian elimination with partial pivoting.
inline Mat solve(Mat A, Mat B) {
  const std::size_t n = A.rows;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(A(r, c)) > std::abs(A(piv, c))) piv = r;
    }
    if (A(piv, c) == 0.0) throw std::runtime_error("singular");
    for (std::size_t k = 0; k < n; ++k) std::swap(A(c, k), A(piv, k));
    for (std::size_t k = 0; k < B.cols; ++k) std::swap(B(c, k), B(piv, k));
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A(r, c) / A(c, c);
      for (std::size_t k = c; k < n; ++k) A(r, k) -= f * A(c, k);
      for (std::size_t k = 0; k < B.cols; ++k) B(r, k) -= f * B(c, k);
    }
  }
  Mat X(n, B.cols);
  for (std::size_t k = 0; k < B.cols; ++k) {
    for (std::size_t r = n; r-- > 0;) {
      double s = B(r, k);
      for (std::size_t j = r + 1; j < n; ++j) s -= A(r, j) * X(j, k);
      X(r, k) = s / A(r, r);
    }
  }
  return X;
}

// Instance-normalized design rows [z, 1] and targets for windows of L + H values.
struct Problem {
  Mat features, targets;
};

inline Problem normalize(const std::vector<std::vector<double>>& windows, std::size_t L, std::size_t H) {
  Problem p{Mat(windows.size(), L + 1), Mat(windows.size(), H)};
  for (std::size_t i = 0; i < windows.size(); ++i) {
    double mean = 0;
    for (std::size_t t = 0; t < L; ++t) mean += windows[i][t];
    mean /= L;
    double var = 0;
    for (std::size_t t = 0; t < L; ++t) var += (windows[i][t] - mean) * (windows[i][t] - mean);
    const double sd = std::max(std::sqrt(var / L), 1e-8);
    for (std::size_t t = 0; t < L; ++t) p.features(i, t) = (windows[i][t] - mean) / sd;
    p.features(i, L) = 1.0;
    for (std::size_t t = 0; t < H; ++t) p.targets(i, t) = (windows[i][L + t] - mean) / sd;
  }
  return p;
}

// Ridge weights H x (L+1) from the normal equations (Z^T Z + pen I) W^T = Z^T Y.
inline Mat ridge(const Problem& p, double pen) {
  const std::size_t k = p.features.cols, h = p.targets.cols, n = p.features.rows;
  Mat G(k, k), R(k, h);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) G(a, b) += p.features(i, a) * p.features(i, b);
      for (std::size_t b = 0; b < h; ++b) R(a, b) += p.features(i, a) * p.targets(i, b);
    }
  }
  for (std::size_t a = 0; a < k; ++a) G(a, a) += pen;
  const Mat Wt = solve(G, R);
  Mat W(h, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < h; ++b) W(b, a) = Wt(a, b);
  }
  return W;
}

// The z part of a normalized row sums to zero, so column L - 1 is implied by
// the others. Dropping it gives a full-rank least-squares problem with the
// same fitted values.
inline Problem drop_column(const Problem& p, std::size_t c) {
  Problem q{Mat(p.features.rows, p.features.cols - 1), p.targets};
  for (std::size_t i = 0; i < p.features.rows; ++i) {
    for (std::size_t a = 0, b = 0; a < p.features.cols; ++a) {
      if (a != c) q.features(i, b++) = p.features(i, a);
    }
  }
  return q;
}

// Fitted values F W^T for weights W (H x cols).
inline Mat fitted(const Problem& p, const Mat& W) {
  Mat out(p.features.rows, W.rows);
  for (std::size_t i = 0; i < p.features.rows; ++i) {
    for (std::size_t o = 0; o < W.rows; ++o) {
      for (std::size_t a = 0; a < W.cols; ++a) out(i, o) += W(o, a) * p.features(i, a);
    }
  }
  return out;
}

inline double objective(const Problem& p, const Mat& W, double pen) {
  double f = 0;
  for (std::size_t i = 0; i < p.features.rows; ++i) {
    for (std::size_t o = 0; o < W.rows; ++o) {
      double y = 0;
      for (std::size_t a = 0; a < W.cols; ++a) y += W(o, a) * p.features(i, a);
      f += (y - p.targets(i, o)) * (y - p.targets(i, o));
    }
  }
  for (double w : W.a) f += pen * w * w;
  return f;
}

// Plain gradient descent with backtracking on the same objective.
inline Mat gradient_descent(const Problem& p, double pen, int iters) {
  Mat W(p.targets.cols, p.features.cols);
  double f = objective(p, W, pen);
  double step = 1e-3;
  for (int it = 0; it < iters; ++it) {
    Mat g(W.rows, W.cols);
    for (std::size_t i = 0; i < p.features.rows; ++i) {
      for (std::size_t o = 0; o < W.rows; ++o) {
        double y = 0;
        for (std::size_t a = 0; a < W.cols; ++a) y += W(o, a) * p.features(i, a);
        const double r = 2 * (y - p.targets(i, o));
        for (std::size_t a = 0; a < W.cols; ++a) g(o, a) += r * p.features(i, a);
      }
    }
    for (std::size_t q = 0; q < W.a.size(); ++q) g.a[q] += 2 * pen * W.a[q];
    for (;;) {
      Mat trial = W;
      for (std::size_t q = 0; q < W.a.size(); ++q) trial.a[q] -= step * g.a[q];
      const double ft = objective(p, trial, pen);
      if (ft <= f) {
        W = trial;
        f = ft;
        step *= 1.2;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) return W;
    }
  }
  return W;
}

// Ranks with ties averaged, 1-based.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) ++less;
      if (w == v[i]) ++equal;
    }
    r[i] = less + (equal + 1) / 2.0;
  }
  return r;
}

inline double binomial_tail(int k, int n) {
  double p = 0;
  for (int i = k; i <= n; ++i) p += std::exp(std::lgamma(n + 1) - std::lgamma(i + 1) - std::lgamma(n - i + 1) - n * std::log(2.0));
  return p;
}

} // namespace oracle

#pragma once

#include "freqsynth/dataset.hpp"
#include "freqsynth/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <vector>

namespace freqsynth::spectral {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// DFT coefficients d(w_j), j = 0 .. n-1, of a real series, unitary scaling.
template <std::floating_point Scalar>
struct Spectrum {
  VectorX<std::complex<Scalar>> coeffs;

  Eigen::Index n() const noexcept { return coeffs.size(); }
};

// Scaled periodogram over bins j = 1 .. floor((n-1)/2); DC and Nyquist excluded.
template <std::floating_point Scalar>
struct Periodogram {
  VectorX<Scalar> freqs;
  VectorX<Scalar> powers;

  Eigen::Index size() const noexcept { return freqs.size(); }
  bool empty() const noexcept { return freqs.size() == 0; }
};

template <std::floating_point Scalar>
struct Peak {
  Scalar frequency;
  Scalar power;
  Eigen::Index bin; // index into Periodogram::freqs
};

inline constexpr Eigen::Index kMinAggregateWindow = 16;
inline constexpr Eigen::Index kPccGridSize = 512;

namespace detail {

template <typename Derived>
void check_series(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() < 2) throw Error(ErrorCode::InvalidSeries, "series needs at least 2 samples");
  if (!x.allFinite()) throw Error(ErrorCode::InvalidSeries, "series contains NaN or Inf");
}

// exp(-2 pi i k / n) for k = 0 .. n-1, each entry from its own exact angle.
template <std::floating_point Scalar>
std::vector<std::complex<Scalar>> unit_roots(std::size_t n) {
  std::vector<std::complex<Scalar>> roots(n);
  const Scalar step = Scalar(-2) * std::numbers::pi_v<Scalar> / static_cast<Scalar>(n);
  for (std::size_t k = 0; k < n; ++k) roots[k] = std::polar(Scalar(1), step * static_cast<Scalar>(k));
  return roots;
}

// In-place iterative radix-2 transform; size must be a power of two.
// Forward uses exp(-2 pi i ...); inverse is unscaled.
template <std::floating_point Scalar>
void fft_pow2(std::vector<std::complex<Scalar>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const auto roots = unit_roots<Scalar>(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<Scalar> w = roots[k * stride];
        if (inverse) w = std::conj(w);
        const auto u = a[start + k];
        const auto v = a[start + k + half] * w;
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Unnormalized forward DFT X_j = sum_t x_t exp(-2 pi i t j / n), t = 0 .. n-1.
template <std::floating_point Scalar>
std::vector<std::complex<Scalar>> fft_any(std::vector<std::complex<Scalar>> x) {
  const std::size_t n = x.size();
  if ((n & (n - 1)) == 0) {
    fft_pow2(x, false);
    return x;
  }

  // Bluestein: t*j = (t^2 + j^2 - (j - t)^2) / 2 turns the DFT into a convolution.
  const std::size_t m = next_pow2(2 * n - 1);
  const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n);
  std::vector<std::complex<Scalar>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % two_n;
    chirp[k] = std::polar(Scalar(1), -std::numbers::pi_v<Scalar> * static_cast<Scalar>(k2) / static_cast<Scalar>(n));
  }

  std::vector<std::complex<Scalar>> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_pow2(a, true);

  const Scalar scale = Scalar(1) / static_cast<Scalar>(m);
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * scale * chirp[k];
  return x;
}

template <std::floating_point Scalar>
Periodogram<Scalar> periodogram_from(const Spectrum<Scalar>& s) {
  const Eigen::Index n = s.n();
  const Eigen::Index bins = (n - 1) / 2;
  Periodogram<Scalar> p;
  p.freqs.resize(bins);
  p.powers.resize(bins);
  const Scalar scale = Scalar(4) / static_cast<Scalar>(n);
  for (Eigen::Index j = 1; j <= bins; ++j) {
    p.freqs[j - 1] = static_cast<Scalar>(j) / static_cast<Scalar>(n);
    p.powers[j - 1] = scale * std::norm(s.coeffs[j]);
  }
  return p;
}

template <std::floating_point Scalar>
VectorX<Scalar> interpolate_powers(const Periodogram<Scalar>& p, const VectorX<Scalar>& grid) {
  VectorX<Scalar> out(grid.size());
  const Eigen::Index m = p.size();
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Scalar g = grid[i];
    if (m == 1 || g <= p.freqs[0]) {
      out[i] = p.powers[0];
    } else if (g >= p.freqs[m - 1]) {
      out[i] = p.powers[m - 1];
    } else {
      const auto* begin = p.freqs.data();
      const Eigen::Index hi = std::upper_bound(begin, begin + m, g) - begin;
      const Eigen::Index lo = hi - 1;
      const Scalar w = (g - p.freqs[lo]) / (p.freqs[hi] - p.freqs[lo]);
      out[i] = (Scalar(1) - w) * p.powers[lo] + w * p.powers[hi];
    }
  }
  return out;
}

} // namespace detail

// d(w_j) = n^{-1/2} sum_{t=1..n} x_t exp(-2 pi i t j / n), O(n log n).
template <typename Derived>
  requires std::floating_point<typename Derived::Scalar>
Spectrum<typename Derived::Scalar> dft(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  detail::check_series(x);
  const auto n = static_cast<std::size_t>(x.size());

  std::vector<std::complex<Scalar>> buf(n);
  for (std::size_t t = 0; t < n; ++t) buf[t] = x(static_cast<Eigen::Index>(t));
  buf = detail::fft_any(std::move(buf));

  // Samples are indexed from t = 1, i.e. a phase shift of exp(-2 pi i j / n).
  const auto roots = detail::unit_roots<Scalar>(n);
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(n));
  Spectrum<Scalar> s;
  s.coeffs.resize(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) s.coeffs[static_cast<Eigen::Index>(j)] = buf[j] * roots[j] * scale;
  return s;
}

// Reference O(n^2) summation of the same transform.
template <typename Derived>
  requires std::floating_point<typename Derived::Scalar>
Spectrum<typename Derived::Scalar> dft_naive(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  detail::check_series(x);
  const auto n = static_cast<std::size_t>(x.size());
  const auto roots = detail::unit_roots<Scalar>(n);
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(n));

  Spectrum<Scalar> s;
  s.coeffs.resize(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    std::complex<Scalar> acc{};
    for (std::size_t t = 1; t <= n; ++t) {
      acc += x(static_cast<Eigen::Index>(t - 1)) * roots[(t * j) % n];
    }
    s.coeffs[static_cast<Eigen::Index>(j)] = acc * scale;
  }
  return s;
}

// P(w_j) = (4/n) |d(w_j)|^2 for j = 1 .. floor((n-1)/2).
template <typename Derived>
  requires std::floating_point<typename Derived::Scalar>
Periodogram<typename Derived::Scalar> scaled_periodogram(const Eigen::MatrixBase<Derived>& x) {
  return detail::periodogram_from(dft(x));
}

// Mean scaled periodogram over every non-overlapping window of every channel.
Periodogram<double> aggregate_periodogram(const Dataset& ds, Eigen::Index window_len);

// 1024, or the largest power of two <= n for shorter series (minimum 16).
Eigen::Index default_window(Eigen::Index n);

// Strict local maxima with power >= rel_threshold * max power, ascending in
// frequency. An end bin counts when it exceeds its only neighbour.
template <std::floating_point Scalar>
std::vector<Peak<Scalar>> find_peaks(const Periodogram<Scalar>& p, Scalar rel_threshold) {
  if (p.empty()) throw Error(ErrorCode::InvalidSeries, "empty periodogram");
  if (!(rel_threshold > 0) || rel_threshold > 1) {
    throw Error(ErrorCode::InvalidConfig, "rel_threshold must lie in (0, 1]");
  }
  const Scalar max_power = p.powers.maxCoeff();
  if (!(max_power > 0)) throw Error(ErrorCode::NoDominantFrequency, "periodogram carries no power");

  const Scalar floor = rel_threshold * max_power;
  const Eigen::Index m = p.size();
  std::vector<Peak<Scalar>> peaks;
  for (Eigen::Index j = 0; j < m; ++j) {
    const Scalar v = p.powers[j];
    const bool above_left = j == 0 || v > p.powers[j - 1];
    const bool above_right = j == m - 1 || v > p.powers[j + 1];
    if (m > 1 && above_left && above_right && v >= floor) peaks.push_back({p.freqs[j], v, j});
    if (m == 1 && v >= floor) peaks.push_back({p.freqs[j], v, j});
  }
  return peaks;
}

// Uniform grid of kPccGridSize frequencies strictly inside (0, 0.5).
template <std::floating_point Scalar>
VectorX<Scalar> pcc_grid() {
  VectorX<Scalar> g(kPccGridSize);
  for (Eigen::Index i = 0; i < kPccGridSize; ++i) {
    g[i] = Scalar(0.5) * static_cast<Scalar>(i + 1) / static_cast<Scalar>(kPccGridSize + 1);
  }
  return g;
}

template <std::floating_point Scalar>
bool same_grid(const Periodogram<Scalar>& a, const Periodogram<Scalar>& b) {
  return a.size() == b.size() && (a.freqs - b.freqs).cwiseAbs().maxCoeff() <= Scalar(1e-12);
}

// Pearson correlation between two power vectors.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar pearson(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size() || a.size() == 0) throw Error(ErrorCode::ShapeMismatch, "pearson needs equal nonempty inputs");
  const auto ca = (a.array() - a.mean()).eval();
  const auto cb = (b.array() - b.mean()).eval();
  const Scalar saa = ca.square().sum();
  const Scalar sbb = cb.square().sum();
  if (!(saa > 0) || !(sbb > 0)) throw Error(ErrorCode::DegenerateSpectrum, "constant input has no correlation");
  const Scalar r = (ca * cb).sum() / std::sqrt(saa * sbb);
  return std::clamp(r, Scalar(-1), Scalar(1));
}

// Pearson correlation of two periodograms; differing grids are first
// linearly interpolated onto pcc_grid().
template <std::floating_point Scalar>
Scalar periodogram_pcc(const Periodogram<Scalar>& a, const Periodogram<Scalar>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidSeries, "empty periodogram");
  if (same_grid(a, b)) return pearson(a.powers, b.powers);
  const auto grid = pcc_grid<Scalar>();
  return pearson(detail::interpolate_powers(a, grid), detail::interpolate_powers(b, grid));
}

// Periodogram similarity of two datasets at their default aggregation windows.
double dataset_pcc(const Dataset& a, const Dataset& b);

} // namespace freqsynth::spectral

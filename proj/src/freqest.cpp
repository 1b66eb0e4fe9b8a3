#include "freqsynth/freqest.hpp"

#include "freqsynth/error.hpp"
#include "freqsynth/spectral.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <vector>

namespace freqsynth::freqest {

std::string_view to_string(EstimateSource source) noexcept {
  switch (source) {
    case EstimateSource::Table: return "table";
    case EstimateSource::Periodogram: return "periodogram";
    case EstimateSource::Prior: return "prior";
  }
  return "unknown";
}

FundamentalEstimate freq_from_sampling_rate(const SamplingRate& rate) {
  return {rate.frequency(), EstimateSource::Table, 1.0};
}

namespace {

// Tolerance for matching k*j against a peak bin. Rounding each peak to its
// nearest bin puts up to (k+1)/2 bins of slack into k*j on top of bin_tol.
int harmonic_tolerance(int k, int bin_tol) { return bin_tol + (k - 1) / 2; }

} // namespace

FundamentalEstimate estimate_fundamental(const Dataset& ds, double rel_threshold, int bin_tol) {
  if (ds.length() < kMinEstimateLength) {
    throw Error(ErrorCode::InvalidSeries,
                fmt::format("estimation needs at least {} samples, got {}", kMinEstimateLength, ds.length()));
  }
  if (bin_tol < 1) throw Error(ErrorCode::InvalidConfig, "bin_tol must be a positive integer");

  const Eigen::Index window = spectral::default_window(ds.length());
  const auto pgram = spectral::aggregate_periodogram(ds, window);
  const auto peaks = spectral::find_peaks(pgram, rel_threshold);
  if (peaks.empty()) throw Error(ErrorCode::NoDominantFrequency, "no peak above threshold");

  const double total = pgram.powers.sum();
  const Eigen::Index bins = pgram.size();
  std::vector<char> counted(static_cast<std::size_t>(bins), 0);
  auto mark = [&](Eigen::Index centre, int tol) {
    for (Eigen::Index b = std::max<Eigen::Index>(0, centre - tol); b <= std::min(bins - 1, centre + tol); ++b) {
      counted[static_cast<std::size_t>(b)] = 1;
    }
  };
  auto captured = [&] {
    double p = 0.0;
    for (Eigen::Index b = 0; b < bins; ++b) {
      if (counted[static_cast<std::size_t>(b)]) p += pgram.powers[b];
    }
    return std::clamp(p / total, 0.0, 1.0);
  };

  // Peak bins are 0-based indices into freqs; the DFT index is bin + 1.
  for (const auto& candidate : peaks) {
    const Eigen::Index j = candidate.bin + 1;
    std::vector<Eigen::Index> partners;
    for (int k = 2; k <= kMaxHarmonic; ++k) {
      const int tol = harmonic_tolerance(k, bin_tol);
      for (const auto& other : peaks) {
        if (other.bin == candidate.bin) continue;
        if (std::llabs(static_cast<long long>(k * j - (other.bin + 1))) <= tol) {
          partners.push_back(other.bin);
          break;
        }
      }
    }
    if (!partners.empty()) {
      mark(candidate.bin, bin_tol);
      for (auto b : partners) mark(b, bin_tol);
      return {static_cast<double>(j) / static_cast<double>(window), EstimateSource::Periodogram, captured()};
    }
  }

  const auto strongest = std::max_element(peaks.begin(), peaks.end(),
                                          [](const auto& a, const auto& b) { return a.power < b.power; });
  mark(strongest->bin, bin_tol);
  return {strongest->frequency, EstimateSource::Periodogram, captured()};
}

} // namespace freqsynth::freqest

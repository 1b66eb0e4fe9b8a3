#pragma once

#include "freqsynth/dataset.hpp"
#include "freqsynth/sampling_rate.hpp"

#include <string_view>

namespace freqsynth::freqest {

enum class EstimateSource { Table, Periodogram, Prior };

std::string_view to_string(EstimateSource source) noexcept;

struct FundamentalEstimate {
  double omega_bar;  // cycles per step, in (0, 0.5)
  EstimateSource source;
  double confidence; // fraction of total power in [0, 1]
};

inline constexpr double kDefaultRelThreshold = 0.1;
inline constexpr int kDefaultBinTolerance = 1;
inline constexpr int kMaxHarmonic = 5;
inline constexpr Eigen::Index kMinEstimateLength = 64;

FundamentalEstimate freq_from_sampling_rate(const SamplingRate& rate);

// Lowest periodogram peak with a harmonic partner among the other peaks
// (k = 2 .. 5); falls back to the strongest peak when none has one.
FundamentalEstimate estimate_fundamental(const Dataset& ds,
                                         double rel_threshold = kDefaultRelThreshold,
                                         int bin_tol = kDefaultBinTolerance);

} // namespace freqsynth::freqest

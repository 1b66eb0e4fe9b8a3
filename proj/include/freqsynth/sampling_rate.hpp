#pragma once

#include <string>
#include <string_view>

namespace freqsynth {

// A sampling-rate tag such as "1h" or "custom:30". Every supported token
// anchors a natural cycle of `steps_per_cycle` samples.
class SamplingRate {
public:
  // Case-insensitive. Throws UnknownSamplingRate or InvalidPeriod.
  static SamplingRate parse(std::string_view token);

  const std::string& token() const noexcept { return token_; }
  int steps_per_cycle() const noexcept { return steps_per_cycle_; }
  double frequency() const noexcept { return 1.0 / steps_per_cycle_; }

  bool operator==(const SamplingRate&) const = default;

private:
  SamplingRate(std::string token, int steps) : token_(std::move(token)), steps_per_cycle_(steps) {}

  std::string token_;
  int steps_per_cycle_;
};

} // namespace freqsynth

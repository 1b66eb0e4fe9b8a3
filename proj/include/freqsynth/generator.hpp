#pragma once

#include "freqsynth/dataset.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace freqsynth::generator {

// Hyper-parameters of one harmonic dataset. Defaults are the standard
// Freq-Synth settings.
struct GeneratorConfig {
  double omega_bar = 1.0 / 24.0; // fundamental, cycles per step
  int m = 100;                   // pool size
  int h = 1;                     // highest harmonic
  double amplitude = 5.0;        // expected amplitude A'
  int l = 10;                    // sines summed per channel
  Eigen::Index n = 50'000;       // series length
  int d = 5;                     // channels
  std::uint64_t seed = 0;

  // Throws InvalidConfig.
  void validate() const;
};

struct SineSpec {
  double amplitude;
  double frequency;
  double phase;

  bool operator==(const SineSpec&) const = default;
};

// Smallest amplitude a pool sine can take.
inline constexpr double kAmplitudeFloor = 0.01;
// Lower frequency bound of the Mix variant.
inline constexpr double kMixMinFrequency = 1.0 / 500.0;

// {k * omega_bar : 1 <= k <= h, k * omega_bar < 0.5}, ascending.
std::vector<double> harmonic_set(double omega_bar, int h);

// m sines with A ~ Exp(A' - 0.01) + 0.01, w ~ U(harmonic_set), phi ~ U[0, 2 pi).
std::vector<SineSpec> build_pool(const GeneratorConfig& cfg);

// Same amplitude and phase laws; frequencies uniform on (1/500, 0.5).
std::vector<SineSpec> build_mix_pool(const GeneratorConfig& cfg);

// A sin(2 pi t w + phi) for t = 0 .. n-1.
Vector render(const SineSpec& sine, Eigen::Index n);

// Each channel sums l pool members drawn uniformly with replacement.
// Uses cfg.seed for the channel draws and cfg.n, cfg.d, cfg.l for shape.
Dataset synthesize_from_pool(std::span<const SineSpec> pool, const GeneratorConfig& cfg);

// build_pool followed by synthesize_from_pool.
Dataset synthesize(const GeneratorConfig& cfg);

// Per-channel (x - mean) / population std. Throws DegenerateChannel.
Dataset standardize(const Dataset& ds);

// Training windows: each row is lookback (L values) followed by horizon (H).
struct WindowSource {
  int dataset;
  int channel;
  Eigen::Index start;
  bool operator==(const WindowSource&) const = default;
};

struct WindowSet {
  RowMatrix values; // rows = windows, cols = L + H
  Eigen::Index lookback_len = 0;
  Eigen::Index horizon_len = 0;
  std::vector<WindowSource> sources;

  Eigen::Index size() const noexcept { return values.rows(); }
  auto lookback(Eigen::Index i) const { return values.row(i).head(lookback_len); }
  auto horizon(Eigen::Index i) const { return values.row(i).tail(horizon_len); }
};

struct WindowSplit {
  WindowSet train;
  WindowSet val;
};

// Draws count_train + count_val distinct (dataset, channel, start) triples
// uniformly over all datasets; the first count_train go to train.
// Throws WindowTooLong when L + H exceeds a dataset and InsufficientData
// when fewer distinct windows exist than requested.
WindowSplit sample_windows(std::span<const Dataset> sources, Eigen::Index count_train, Eigen::Index count_val,
                           Eigen::Index lookback, Eigen::Index horizon, std::uint64_t seed);

// Every stride-1 window of every channel.
WindowSet all_windows(const Dataset& ds, Eigen::Index lookback, Eigen::Index horizon);

struct FreqSynthOptions {
  Eigen::Index count_train = 5000;
  Eigen::Index count_val = 5000;
  Eigen::Index lookback = 96;
  Eigen::Index horizon = 720;
  std::vector<int> h_values{1, 2, 3};
  // Shape and pool parameters (omega_bar, h and seed are set per dataset).
  GeneratorConfig base{};
};

struct SynthBundle {
  std::vector<Dataset> datasets; // standardized sources
  std::vector<double> fundamentals; // per dataset; 0 for the Mix variant
  std::vector<int> harmonics;       // per dataset
  WindowSplit windows;
};

// One standardized dataset per h in h_values, then pooled window sampling.
SynthBundle freq_synth(double omega_bar, std::uint64_t seed, const FreqSynthOptions& opts = {});

inline constexpr double kNaturalFundamentals[] = {1.0 / 30.0, 1.0 / 7.0, 1.0 / 24.0, 1.0 / 60.0};

// One dataset per (natural fundamental, h) pair.
SynthBundle freq_synth_natural(std::uint64_t seed, const FreqSynthOptions& opts = {});

// One dataset per entry of h_values, each from a pool of random frequencies.
SynthBundle freq_synth_mix(std::uint64_t seed, const FreqSynthOptions& opts = {});

} // namespace freqsynth::generator

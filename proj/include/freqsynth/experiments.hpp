#pragma once

#include "freqsynth/dataset.hpp"
#include "freqsynth/eval.hpp"
#include "freqsynth/forecast.hpp"
#include "freqsynth/generator.hpp"
#include "freqsynth/random.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace freqsynth::eval {

// Shared knobs of the clean-sine experiments.
struct SineExperimentConfig {
  Eigen::Index lookback = 96;
  Eigen::Index horizon = 96;
  double lambda = forecast::kDefaultLambda;
  int channels_per_frequency = 4;
  Eigen::Index series_length = 2000;
  Eigen::Index windows_per_channel = 200;
  Eigen::Index test_length = 1000;
};

// Distractor law: log-uniform over (1/200, 0.45), rejecting anything within
// one lookback bin (1/lookback) of a harmonic of `base` or of an `avoid` entry.
std::vector<double> draw_distractors(double base, std::size_t count, Rng& rng, Eigen::Index lookback,
                                     std::span<const double> avoid = {});

// One channel per (frequency, replica): unit-expected amplitude, random phase.
Dataset sine_dataset(std::span<const double> frequencies, int channels_per_frequency, Eigen::Index length, Rng& rng);

struct ConfusionPoint {
  int distractors;
  double mse;
};

inline const std::vector<int> kDefaultDistractorCounts{0, 1, 2, 4, 8, 16};

// Ridge trained on the base sine plus the first c distractor sines, tested on
// fresh base-frequency windows, for each c in `counts`.
std::vector<ConfusionPoint> confusion_experiment(double base_omega, std::span<const int> counts, std::uint64_t seed,
                                                 const SineExperimentConfig& cfg = {});

struct GeneralizationResult {
  double mse_with;
  double mse_without;
  std::vector<double> train_with;    // frequencies of the first training set
  std::vector<double> train_without; // same size, target replaced
};

inline constexpr int kGeneralizationCompanions = 2;

GeneralizationResult generalization_experiment(double target_omega, std::uint64_t seed,
                                               const SineExperimentConfig& cfg = {});

// Settings for the Freq-Synth driven experiments (sweeps and few-shot).
struct SynthExperimentConfig {
  Eigen::Index lookback = 96;
  Eigen::Index horizon = 96;
  double lambda = forecast::kDefaultLambda;
  Eigen::Index count_train = 5000;
  Eigen::Index target_length = 5000;
  int target_harmonics = 3;
  SplitSpec split = kDefaultSplit;
};

struct SweepTarget {
  std::string id;
  Dataset data;     // raw; standardized internally with train statistics
  double omega_bar; // fundamental used to drive the generator
};

// A target with known harmonic structure: synthesize(omega, h) with its own seed.
SweepTarget synthetic_target(std::string id, double omega_bar, int harmonics, std::uint64_t seed,
                             Eigen::Index length = 5000, int channels = 5);

struct HarmonicsRow {
  int h;
  std::string dataset;
  double mse;
};

inline const std::vector<int> kDefaultHarmonicValues{1, 2, 3, 4};

// For each h: Freq-Synth with datasets for harmonics 1..h, ridge fit, then
// zero-shot MSE on every target's test segment.
std::vector<HarmonicsRow> harmonics_sweep(std::span<const int> h_values, std::span<const SweepTarget> targets,
                                          std::uint64_t seed, const SynthExperimentConfig& cfg = {});

// MSE grid, rows = training window counts, cols = channel counts d.
Matrix size_variates_sweep(std::span<const Eigen::Index> sizes, std::span<const int> d_values,
                           const SweepTarget& target, std::uint64_t seed, const SynthExperimentConfig& cfg = {});

struct FewShotResult {
  double mse_zero_shot;
  double mse_finetuned;
  Eigen::Index fewshot_windows;
};

// Pretrain on Freq-Synth at source_omega, then anchored fine-tuning on a
// `fraction` of the target's train+val windows; both scored on the test segment.
FewShotResult fewshot_experiment(double source_omega, const SweepTarget& target, std::uint64_t seed,
                                 double fraction = 0.1, double anchor = forecast::kDefaultAnchor,
                                 const SynthExperimentConfig& cfg = {});

// Six-dataset registry: two sibling datasets (shared pool, independent
// channel draws) per fundamental in {1/7, 1/24, 1/96}.
std::vector<NamedDataset> synthetic_registry(std::uint64_t seed, int channels = 64, Eigen::Index length = 4096);

struct TransferSummary {
  TransferMatrix matrix;
  Matrix pcc; // periodogram PCC of (train, test) datasets
  double mean_scaled_high;  // off-diagonal cells with PCC >= 0.9
  double mean_scaled_low;   // off-diagonal cells with PCC < 0.5
  int high_cells;
  int low_cells;
};

// Ridge trainer on `count_train` windows sampled from each train segment.
Trainer ridge_trainer(std::uint64_t seed, Eigen::Index lookback, Eigen::Index horizon, Eigen::Index count_train = 2000,
                      double lambda = forecast::kDefaultLambda);

TransferSummary transfer_experiment(std::span<const NamedDataset> datasets, std::uint64_t seed,
                                    Eigen::Index lookback = 96, Eigen::Index horizon = 96);

} // namespace freqsynth::eval

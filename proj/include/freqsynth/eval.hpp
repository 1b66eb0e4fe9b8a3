#pragma once

#include "freqsynth/dataset.hpp"
#include "freqsynth/error.hpp"
#include "freqsynth/forecast.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace freqsynth::eval {

using forecast::Forecaster;
using forecast::Matrix;

struct SplitSpec {
  double train_frac;
  double val_frac;
  double test_frac;

  // Throws InvalidConfig unless each fraction is in (0, 1) and they sum to 1.
  void validate() const;
};

inline constexpr SplitSpec kEttSplit{0.6, 0.2, 0.2};
inline constexpr SplitSpec kDefaultSplit{0.7, 0.2, 0.1};

struct Splits {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Chronological train/val/test partition with boundaries at floor(n * frac).
// Throws SplitTooSmall when any segment is shorter than min_segment (or empty).
Splits split(const Dataset& ds, const SplitSpec& spec, Eigen::Index min_segment = 1);

// Splits standardized with the train segment's per-channel statistics.
Splits prepare(const Dataset& ds, const SplitSpec& spec, Eigen::Index min_segment = 1);

struct Metrics {
  double mse = 0.0;
  double mae = 0.0;
};

// Elementwise mean squared and absolute error. Throws ShapeMismatch.
template <typename DerivedP, typename DerivedT>
Metrics metrics(const Eigen::MatrixBase<DerivedP>& preds, const Eigen::MatrixBase<DerivedT>& targets) {
  if (preds.rows() != targets.rows() || preds.cols() != targets.cols() || preds.size() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "predictions and targets must have equal nonempty shapes");
  }
  const auto diff = (preds.derived().template cast<double>() - targets.derived().template cast<double>()).array().eval();
  const auto n = static_cast<double>(diff.size());
  return {diff.square().sum() / n, diff.abs().sum() / n};
}

// Streaming accumulation of the same quantities over many batches.
class MetricsAccumulator {
public:
  template <typename DerivedP, typename DerivedT>
  void add(const Eigen::MatrixBase<DerivedP>& preds, const Eigen::MatrixBase<DerivedT>& targets) {
    if (preds.rows() != targets.rows() || preds.cols() != targets.cols()) {
      throw Error(ErrorCode::ShapeMismatch, "predictions and targets must have equal shapes");
    }
    const auto diff = (preds - targets).array().eval();
    sq_ += diff.square().sum();
    abs_ += diff.abs().sum();
    count_ += diff.size();
  }

  Metrics result() const;
  Eigen::Index count() const noexcept { return count_; }

private:
  double sq_ = 0.0;
  double abs_ = 0.0;
  Eigen::Index count_ = 0;
};

struct EvalReport {
  std::string dataset;
  Eigen::Index horizon = 0;
  double mse = 0.0;
  double mae = 0.0;
  std::string model;
  std::uint64_t seed = 0;
  Eigen::Index windows = 0;
};

inline const std::vector<Eigen::Index> kDefaultHorizons{96, 192, 336, 720};

// Stride-1 windows over every channel of `test`; one report per horizon.
// Throws SplitTooSmall when lookback + max horizon exceeds the segment.
std::vector<EvalReport> evaluate_zero_shot(const Forecaster& model, const Dataset& test, const std::string& dataset_id,
                                           Eigen::Index lookback = 96,
                                           std::span<const Eigen::Index> horizons = kDefaultHorizons,
                                           std::uint64_t seed = 0);

// MSE/MAE of one horizon.
Metrics evaluate_horizon(const Forecaster& model, const Dataset& test, Eigen::Index lookback, Eigen::Index horizon);

// (v - min) / (max - min); a constant input maps to all zeros.
Vector min_max_scale(const Eigen::Ref<const Vector>& values);

struct TransferMatrix {
  std::vector<std::string> ids;
  Matrix raw;    // rows = train dataset, cols = test dataset
  Matrix scaled; // per column, min-max over the off-diagonal cells
};

struct NamedDataset {
  std::string id;
  Dataset data;
};

using Trainer = std::function<Forecaster(const Dataset& train_segment, std::size_t index)>;

// Trains on each dataset's train segment and tests on every dataset's test
// segment (each standardized with its own train statistics).
TransferMatrix transfer_matrix(std::span<const NamedDataset> datasets, const Trainer& trainer, Eigen::Index lookback,
                               Eigen::Index horizon, const SplitSpec& spec = kDefaultSplit);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// One-sided sign test: P(X >= successes) for X ~ Binomial(trials, 1/2).
double sign_test_p(int successes, int trials);

} // namespace freqsynth::eval

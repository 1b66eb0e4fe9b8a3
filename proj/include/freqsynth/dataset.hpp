#pragma once

#include "freqsynth/sampling_rate.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace freqsynth {

// Channels are rows so that each series is contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// d x n multivariate series.
struct Dataset {
  RowMatrix values;
  std::vector<std::string> channel_names;
  std::optional<SamplingRate> rate;
  std::string provenance;
  bool standardized = false;

  Eigen::Index channels() const noexcept { return values.rows(); }
  Eigen::Index length() const noexcept { return values.cols(); }

  auto channel(Eigen::Index i) const { return values.row(i); }

  // Throws InvalidSeries on non-finite values or mismatched channel names.
  void validate() const;
};

// Wraps a value matrix with default channel names "c0", "c1", ...
Dataset make_dataset(RowMatrix values, std::string provenance = {});

// Per-channel mean and population standard deviation.
struct ChannelStats {
  Vector mean;
  Vector stddev;
};

ChannelStats channel_stats(const Dataset& ds);

// (x - mean) / stddev per channel. Throws DegenerateChannel on zero stddev.
Dataset apply_stats(const Dataset& ds, const ChannelStats& stats);

// Columns [begin, end) of every channel; metadata is carried over.
Dataset slice(const Dataset& ds, Eigen::Index begin, Eigen::Index end);

} // namespace freqsynth

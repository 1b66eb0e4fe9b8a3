#pragma once

#include "freqsynth/dataset.hpp"
#include "freqsynth/error.hpp"
#include "freqsynth/generator.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace freqsynth::forecast {

using Matrix = Eigen::MatrixXd;
using generator::WindowSet;

inline constexpr double kDefaultLambda = 1e-3;
inline constexpr double kDefaultAnchor = 1.0;
inline constexpr double kStdFloor = 1e-8;

// Last-value carry-forward.
template <typename Derived>
Vector naive_forecast(const Eigen::MatrixBase<Derived>& lookback, Eigen::Index horizon) {
  if (lookback.size() < 1) throw Error(ErrorCode::InvalidWindow, "empty lookback");
  if (horizon < 1) throw Error(ErrorCode::InvalidWindow, "horizon must be >= 1");
  return Vector::Constant(horizon, lookback(lookback.size() - 1));
}

// output[h] = lookback[L - period + (h mod period)].
template <typename Derived>
Vector seasonal_naive_forecast(const Eigen::MatrixBase<Derived>& lookback, Eigen::Index horizon, Eigen::Index period) {
  const Eigen::Index len = lookback.size();
  if (len < 1) throw Error(ErrorCode::InvalidWindow, "empty lookback");
  if (horizon < 1) throw Error(ErrorCode::InvalidWindow, "horizon must be >= 1");
  if (period < 1) throw Error(ErrorCode::InvalidPeriod, "seasonal period must be >= 1");
  if (period > len) throw Error(ErrorCode::PeriodTooLong, "seasonal period exceeds the lookback");
  Vector out(horizon);
  for (Eigen::Index h = 0; h < horizon; ++h) out[h] = lookback(len - period + (h % period));
  return out;
}

// Affine map from an instance-normalized lookback (plus bias) to the
// normalized horizon.
struct LinearForecaster {
  Matrix weights; // H x (L + 1); last column is the bias
  Eigen::Index lookback_len = 0;
  Eigen::Index horizon_len = 0;
  double lambda = 0.0; // relative ridge coefficient used at fit time
};

// Lookback mean and population std, with the std floored at kStdFloor.
struct InstanceStats {
  double mean;
  double scale;
};

template <typename Derived>
InstanceStats instance_stats(const Eigen::MatrixBase<Derived>& lookback) {
  const double mean = lookback.mean();
  const double var = (lookback.array() - mean).square().mean();
  return {mean, std::max(std::sqrt(var), kStdFloor)};
}

// Normalized design [z, 1] and normalized targets, one row per window.
struct Design {
  Matrix features; // N x (L + 1)
  Matrix targets;  // N x H
};

Design build_design(const WindowSet& windows);

// Minimizes sum ||W [z; 1] - y||^2 + lambda * s * ||W||_F^2 over all windows,
// with s = trace(Z^T Z) / (L + 1) so lambda is relative to the mean feature
// second moment. Throws EmptyTrainingSet.
LinearForecaster fit_ridge(const WindowSet& windows, double lambda = kDefaultLambda);

// Ridge refit on few-shot windows with an extra anchor * s * ||W - W0||_F^2
// pulling towards the pretrained weights; uses the model's lambda.
LinearForecaster finetune(const LinearForecaster& pretrained, const WindowSet& fewshot,
                          double anchor = kDefaultAnchor);

// Forecast of the first `horizon` steps (defaults to the model horizon).
Vector predict(const LinearForecaster& model, const Eigen::Ref<const Vector>& lookback, Eigen::Index horizon = -1);

// Batched predict: one lookback per row, one forecast per row.
Matrix predict_rows(const LinearForecaster& model, const Eigen::Ref<const RowMatrix>& lookbacks,
                    Eigen::Index horizon = -1);

// Objective value of the ridge problem for given weights (used by tests and
// diagnostics).
double ridge_objective(const Design& design, const Matrix& weights, double penalty);

// Uniform view used by the evaluation harness: lookbacks in rows, forecasts
// in rows.
struct Forecaster {
  std::string id;
  std::function<Matrix(const RowMatrix& lookbacks, Eigen::Index horizon)> forecast;
};

Forecaster naive_model();
Forecaster seasonal_naive_model(Eigen::Index period);
Forecaster ridge_model(LinearForecaster model, std::string id = "ridge");

} // namespace freqsynth::forecast

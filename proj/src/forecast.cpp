#include "freqsynth/forecast.hpp"

#include <fmt/format.h>

#include <utility>

namespace freqsynth::forecast {

Design build_design(const WindowSet& windows) {
  const Eigen::Index count = windows.size();
  const Eigen::Index len = windows.lookback_len;
  Design d;
  d.features.resize(count, len + 1);
  d.targets.resize(count, windows.horizon_len);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto lb = windows.lookback(i);
    const auto st = instance_stats(lb);
    d.features.row(i).head(len) = (lb.array() - st.mean) / st.scale;
    d.features(i, len) = 1.0;
    d.targets.row(i) = (windows.horizon(i).array() - st.mean) / st.scale;
  }
  return d;
}

namespace {

// Solves (G + penalty I) X = rhs for symmetric PSD G.
Matrix solve_regularized(Matrix gram, const Matrix& rhs, double penalty) {
  gram.diagonal().array() += penalty;
  if (penalty > 0.0) {
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() == Eigen::Success) return llt.solve(rhs);
  }
  // Unregularized or numerically indefinite: minimum-norm least squares.
  return Eigen::CompleteOrthogonalDecomposition<Matrix>(gram).solve(rhs);
}

double penalty_scale(const Matrix& gram) {
  return gram.trace() / static_cast<double>(gram.rows());
}

void check_windows(const WindowSet& windows) {
  if (windows.size() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no training windows");
  if (windows.lookback_len < 1 || windows.horizon_len < 1) {
    throw Error(ErrorCode::InvalidWindow, "window set has empty lookback or horizon");
  }
}

} // namespace

LinearForecaster fit_ridge(const WindowSet& windows, double lambda) {
  check_windows(windows);
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidConfig, "lambda must be >= 0");
  const Design d = build_design(windows);
  const Matrix gram = d.features.transpose() * d.features;
  const Matrix cross = d.features.transpose() * d.targets;
  const double penalty = lambda * penalty_scale(gram);

  LinearForecaster model;
  model.weights = solve_regularized(gram, cross, penalty).transpose();
  model.lookback_len = windows.lookback_len;
  model.horizon_len = windows.horizon_len;
  model.lambda = lambda;
  return model;
}

LinearForecaster finetune(const LinearForecaster& pretrained, const WindowSet& fewshot, double anchor) {
  check_windows(fewshot);
  if (!(anchor >= 0.0)) throw Error(ErrorCode::InvalidConfig, "anchor must be >= 0");
  if (fewshot.lookback_len != pretrained.lookback_len || fewshot.horizon_len != pretrained.horizon_len) {
    throw Error(ErrorCode::InvalidWindow,
                fmt::format("few-shot windows are {}+{}, model expects {}+{}", fewshot.lookback_len,
                            fewshot.horizon_len, pretrained.lookback_len, pretrained.horizon_len));
  }
  const Design d = build_design(fewshot);
  const Matrix gram = d.features.transpose() * d.features;
  const double scale = penalty_scale(gram);
  Matrix rhs = d.features.transpose() * d.targets;
  if (anchor > 0.0) rhs += (anchor * scale) * pretrained.weights.transpose();

  LinearForecaster model = pretrained;
  model.weights = solve_regularized(gram, rhs, (pretrained.lambda + anchor) * scale).transpose();
  return model;
}

namespace {

Eigen::Index resolve_horizon(const LinearForecaster& model, Eigen::Index horizon) {
  if (horizon < 0) return model.horizon_len;
  if (horizon < 1 || horizon > model.horizon_len) {
    throw Error(ErrorCode::InvalidWindow,
                fmt::format("horizon {} outside the model's 1..{}", horizon, model.horizon_len));
  }
  return horizon;
}

} // namespace

Vector predict(const LinearForecaster& model, const Eigen::Ref<const Vector>& lookback, Eigen::Index horizon) {
  if (lookback.size() != model.lookback_len) {
    throw Error(ErrorCode::InvalidWindow,
                fmt::format("lookback has {} values, model expects {}", lookback.size(), model.lookback_len));
  }
  const Eigen::Index h = resolve_horizon(model, horizon);
  const auto st = instance_stats(lookback);
  Vector z(model.lookback_len + 1);
  z.head(model.lookback_len) = (lookback.array() - st.mean) / st.scale;
  z[model.lookback_len] = 1.0;
  return (model.weights.topRows(h) * z).array() * st.scale + st.mean;
}

Matrix predict_rows(const LinearForecaster& model, const Eigen::Ref<const RowMatrix>& lookbacks,
                    Eigen::Index horizon) {
  if (lookbacks.cols() != model.lookback_len) {
    throw Error(ErrorCode::InvalidWindow,
                fmt::format("lookback has {} values, model expects {}", lookbacks.cols(), model.lookback_len));
  }
  const Eigen::Index h = resolve_horizon(model, horizon);
  const Eigen::Index count = lookbacks.rows();
  Matrix z(count, model.lookback_len + 1);
  Vector means(count), scales(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto st = instance_stats(lookbacks.row(i));
    means[i] = st.mean;
    scales[i] = st.scale;
    z.row(i).head(model.lookback_len) = (lookbacks.row(i).array() - st.mean) / st.scale;
    z(i, model.lookback_len) = 1.0;
  }
  Matrix out = z * model.weights.topRows(h).transpose();
  for (Eigen::Index i = 0; i < count; ++i) out.row(i) = out.row(i).array() * scales[i] + means[i];
  return out;
}

double ridge_objective(const Design& design, const Matrix& weights, double penalty) {
  const Matrix residual = design.features * weights.transpose() - design.targets;
  return residual.squaredNorm() + penalty * weights.squaredNorm();
}

Forecaster naive_model() {
  return {"naive", [](const RowMatrix& lookbacks, Eigen::Index horizon) {
            Matrix out(lookbacks.rows(), horizon);
            for (Eigen::Index i = 0; i < lookbacks.rows(); ++i) {
              out.row(i) = naive_forecast(lookbacks.row(i), horizon).transpose();
            }
            return out;
          }};
}

Forecaster seasonal_naive_model(Eigen::Index period) {
  return {fmt::format("snaive-{}", period), [period](const RowMatrix& lookbacks, Eigen::Index horizon) {
            Matrix out(lookbacks.rows(), horizon);
            for (Eigen::Index i = 0; i < lookbacks.rows(); ++i) {
              out.row(i) = seasonal_naive_forecast(lookbacks.row(i), horizon, period).transpose();
            }
            return out;
          }};
}

Forecaster ridge_model(LinearForecaster model, std::string id) {
  return {std::move(id), [m = std::move(model)](const RowMatrix& lookbacks, Eigen::Index horizon) {
            return predict_rows(m, lookbacks, horizon);
          }};
}

} // namespace freqsynth::forecast

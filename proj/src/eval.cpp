#include "freqsynth/eval.hpp"

#include "freqsynth/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace freqsynth::eval {

void SplitSpec::validate() const {
  for (const double f : {train_frac, val_frac, test_frac}) {
    if (!(f > 0.0 && f < 1.0)) throw Error(ErrorCode::InvalidConfig, fmt::format("split fraction {} not in (0, 1)", f));
  }
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidConfig, "split fractions must sum to 1");
  }
}

namespace {

// floor(n * frac), tolerant of fractions such as 0.7 that are not exact in binary.
Eigen::Index floor_share(Eigen::Index n, double frac) {
  return static_cast<Eigen::Index>(std::floor(static_cast<double>(n) * frac + 1e-9));
}

} // namespace

Splits split(const Dataset& ds, const SplitSpec& spec, Eigen::Index min_segment) {
  spec.validate();
  const Eigen::Index n = ds.length();
  const Eigen::Index train_end = floor_share(n, spec.train_frac);
  const Eigen::Index val_end = train_end + floor_share(n, spec.val_frac);
  const Eigen::Index need = std::max<Eigen::Index>(1, min_segment);
  if (train_end < need || val_end - train_end < need || n - val_end < need) {
    throw Error(ErrorCode::SplitTooSmall,
                fmt::format("segments {}/{}/{} of n={} are shorter than {}", train_end, val_end - train_end,
                            n - val_end, n, need));
  }
  return {slice(ds, 0, train_end), slice(ds, train_end, val_end), slice(ds, val_end, n)};
}

Splits prepare(const Dataset& ds, const SplitSpec& spec, Eigen::Index min_segment) {
  Splits s = split(ds, spec, min_segment);
  const ChannelStats stats = channel_stats(s.train);
  s.train = apply_stats(s.train, stats);
  s.val = apply_stats(s.val, stats);
  s.test = apply_stats(s.test, stats);
  return s;
}

Metrics MetricsAccumulator::result() const {
  if (count_ == 0) throw Error(ErrorCode::ShapeMismatch, "no values accumulated");
  return {sq_ / static_cast<double>(count_), abs_ / static_cast<double>(count_)};
}

Metrics evaluate_horizon(const Forecaster& model, const Dataset& test, Eigen::Index lookback, Eigen::Index horizon) {
  const Eigen::Index starts = test.length() - lookback - horizon + 1;
  if (lookback < 1 || horizon < 1) throw Error(ErrorCode::InvalidWindow, "lookback and horizon must be >= 1");
  if (starts < 1) {
    throw Error(ErrorCode::SplitTooSmall, fmt::format("test segment of {} steps cannot hold lookback {} + horizon {}",
                                                      test.length(), lookback, horizon));
  }
  constexpr Eigen::Index kBatch = 2048;
  MetricsAccumulator acc;
  RowMatrix lookbacks;
  Matrix targets;
  for (Eigen::Index c = 0; c < test.channels(); ++c) {
    const auto row = test.values.row(c);
    for (Eigen::Index first = 0; first < starts; first += kBatch) {
      const Eigen::Index count = std::min(kBatch, starts - first);
      lookbacks.resize(count, lookback);
      targets.resize(count, horizon);
      for (Eigen::Index i = 0; i < count; ++i) {
        lookbacks.row(i) = row.segment(first + i, lookback);
        targets.row(i) = row.segment(first + i + lookback, horizon);
      }
      acc.add(model.forecast(lookbacks, horizon), targets);
    }
  }
  return acc.result();
}

std::vector<EvalReport> evaluate_zero_shot(const Forecaster& model, const Dataset& test, const std::string& dataset_id,
                                           Eigen::Index lookback, std::span<const Eigen::Index> horizons,
                                           std::uint64_t seed) {
  if (horizons.empty()) throw Error(ErrorCode::InvalidConfig, "no horizons requested");
  const Eigen::Index longest = *std::max_element(horizons.begin(), horizons.end());
  if (test.length() < lookback + longest) {
    throw Error(ErrorCode::SplitTooSmall, fmt::format("test segment of {} steps cannot hold lookback {} + horizon {}",
                                                      test.length(), lookback, longest));
  }
  std::vector<EvalReport> reports;
  for (const Eigen::Index h : horizons) {
    const Metrics m = evaluate_horizon(model, test, lookback, h);
    reports.push_back({dataset_id, h, m.mse, m.mae, model.id, seed, test.channels() * (test.length() - lookback - h + 1)});
  }
  return reports;
}

Vector min_max_scale(const Eigen::Ref<const Vector>& values) {
  if (values.size() == 0) return Vector();
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  if (!(hi > lo)) return Vector::Zero(values.size());
  return (values.array() - lo) / (hi - lo);
}

TransferMatrix transfer_matrix(std::span<const NamedDataset> datasets, const Trainer& trainer, Eigen::Index lookback,
                               Eigen::Index horizon, const SplitSpec& spec) {
  const auto count = datasets.size();
  if (count < 2) throw Error(ErrorCode::InvalidConfig, "transfer matrix needs at least 2 datasets");

  std::vector<Splits> prepared(count);
  parallel_for(count, [&](std::size_t i) { prepared[i] = prepare(datasets[i].data, spec, lookback + horizon); });

  std::vector<Forecaster> models(count);
  parallel_for(count, [&](std::size_t i) { models[i] = trainer(prepared[i].train, i); });

  const auto k = static_cast<Eigen::Index>(count);
  TransferMatrix tm;
  tm.raw.resize(k, k);
  parallel_for(count * count, [&](std::size_t cell) {
    const std::size_t r = cell / count;
    const std::size_t c = cell % count;
    tm.raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
        evaluate_horizon(models[r], prepared[c].test, lookback, horizon).mse;
  });

  tm.scaled.resize(k, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    Vector off(k - 1);
    for (Eigen::Index r = 0, j = 0; r < k; ++r) {
      if (r != c) off[j++] = tm.raw(r, c);
    }
    const double lo = off.minCoeff();
    const double hi = off.maxCoeff();
    for (Eigen::Index r = 0; r < k; ++r) {
      // The in-domain cell is placed on the same scale, clamped into [0, 1].
      const double v = hi > lo ? (tm.raw(r, c) - lo) / (hi - lo) : 0.0;
      tm.scaled(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  for (const auto& d : datasets) tm.ids.push_back(d.id);
  return tm;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

} // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::ShapeMismatch, "spearman needs two equal series");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const Eigen::Map<const Vector> a(rx.data(), static_cast<Eigen::Index>(rx.size()));
  const Eigen::Map<const Vector> b(ry.data(), static_cast<Eigen::Index>(ry.size()));
  const Vector ca = a.array() - a.mean();
  const Vector cb = b.array() - b.mean();
  const double denom = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
  if (!(denom > 0.0)) return 0.0;
  return ca.dot(cb) / denom;
}

double sign_test_p(int successes, int trials) {
  if (trials < 1 || successes < 0 || successes > trials) throw Error(ErrorCode::InvalidConfig, "bad sign test counts");
  double p = 0.0;
  for (int k = successes; k <= trials; ++k) {
    p += std::exp(std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0) -
                  trials * std::log(2.0));
  }
  return std::min(1.0, p);
}

} // namespace freqsynth::eval

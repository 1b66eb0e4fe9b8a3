#include "freqsynth/experiments.hpp"

#include "freqsynth/error.hpp"
#include "freqsynth/parallel.hpp"
#include "freqsynth/spectral.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace freqsynth::eval {

namespace {

constexpr double kDistractorMin = 1.0 / 200.0;
constexpr double kDistractorMax = 0.45;

bool near_harmonic(double f, double base, double tol) {
  for (int k = 1; k * base < 0.5 + tol; ++k) {
    if (std::abs(f - k * base) < tol) return true;
  }
  return false;
}

RowMatrix channel_rows(const Dataset& ds, Eigen::Index first, Eigen::Index count) {
  return ds.values.middleRows(first, count);
}

Dataset take_groups(const Dataset& ds, std::span<const int> groups, int per_group) {
  RowMatrix rows(static_cast<Eigen::Index>(groups.size()) * per_group, ds.length());
  Eigen::Index at = 0;
  for (const int g : groups) {
    rows.middleRows(at, per_group) = channel_rows(ds, static_cast<Eigen::Index>(g) * per_group, per_group);
    at += per_group;
  }
  return make_dataset(std::move(rows), ds.provenance);
}

forecast::LinearForecaster fit_on(const Dataset& train, const SineExperimentConfig& cfg, std::uint64_t seed) {
  const Eigen::Index count = cfg.windows_per_channel * train.channels();
  const auto windows = generator::sample_windows(std::span(&train, 1), count, 0, cfg.lookback, cfg.horizon, seed);
  return forecast::fit_ridge(windows.train, cfg.lambda);
}

double test_mse(const forecast::LinearForecaster& model, const Dataset& test, Eigen::Index lookback,
                Eigen::Index horizon) {
  return evaluate_horizon(forecast::ridge_model(model), test, lookback, horizon).mse;
}

} // namespace

std::vector<double> draw_distractors(double base, std::size_t count, Rng& rng, Eigen::Index lookback,
                                     std::span<const double> avoid) {
  const double tol = 1.0 / static_cast<double>(lookback);
  const double log_lo = std::log(kDistractorMin);
  const double log_hi = std::log(kDistractorMax);
  std::vector<double> out;
  while (out.size() < count) {
    const double f = std::exp(rng.uniform(log_lo, log_hi));
    if (near_harmonic(f, base, tol)) continue;
    const bool clash = std::any_of(avoid.begin(), avoid.end(), [&](double a) { return std::abs(f - a) < tol; });
    if (clash) continue;
    out.push_back(f);
  }
  return out;
}

Dataset sine_dataset(std::span<const double> frequencies, int channels_per_frequency, Eigen::Index length, Rng& rng) {
  if (channels_per_frequency < 1) throw Error(ErrorCode::InvalidConfig, "channels_per_frequency must be >= 1");
  RowMatrix values(static_cast<Eigen::Index>(frequencies.size()) * channels_per_frequency, length);
  Eigen::Index row = 0;
  for (const double f : frequencies) {
    for (int r = 0; r < channels_per_frequency; ++r) {
      generator::SineSpec s{};
      s.amplitude = rng.exponential(1.0 - generator::kAmplitudeFloor) + generator::kAmplitudeFloor;
      s.frequency = f;
      s.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      values.row(row++) = generator::render(s, length).transpose();
    }
  }
  return make_dataset(std::move(values), "clean sines");
}

std::vector<ConfusionPoint> confusion_experiment(double base_omega, std::span<const int> counts, std::uint64_t seed,
                                                 const SineExperimentConfig& cfg) {
  if (counts.empty()) return {};
  if (*std::min_element(counts.begin(), counts.end()) < 0) {
    throw Error(ErrorCode::InvalidConfig, "distractor counts must be >= 0");
  }
  const int most = *std::max_element(counts.begin(), counts.end());

  Rng rng = Rng::derive(seed, 0);
  std::vector<double> freqs{base_omega};
  const auto distractors = draw_distractors(base_omega, static_cast<std::size_t>(most), rng, cfg.lookback);
  freqs.insert(freqs.end(), distractors.begin(), distractors.end());

  // Channels are grouped by frequency; run c uses groups 0 .. c.
  Rng train_rng = Rng::derive(seed, 1);
  const Dataset all = generator::standardize(
      sine_dataset(freqs, cfg.channels_per_frequency, cfg.series_length, train_rng));
  Rng test_rng = Rng::derive(seed, 2);
  const Dataset test = generator::standardize(
      sine_dataset(std::span(freqs.data(), 1), cfg.channels_per_frequency, cfg.test_length, test_rng));

  std::vector<ConfusionPoint> curve(counts.size());
  parallel_for(counts.size(), [&](std::size_t i) {
    std::vector<int> groups(static_cast<std::size_t>(counts[i]) + 1);
    std::iota(groups.begin(), groups.end(), 0);
    const Dataset train = take_groups(all, groups, cfg.channels_per_frequency);
    const auto model = fit_on(train, cfg, Rng::derive(seed, 100 + static_cast<std::uint64_t>(counts[i])).next_u64());
    curve[i] = {counts[i], test_mse(model, test, cfg.lookback, cfg.horizon)};
  });
  return curve;
}

GeneralizationResult generalization_experiment(double target_omega, std::uint64_t seed,
                                               const SineExperimentConfig& cfg) {
  Rng rng = Rng::derive(seed, 0);
  const auto companions = draw_distractors(target_omega, kGeneralizationCompanions, rng, cfg.lookback);
  const auto replacement = draw_distractors(target_omega, 1, rng, cfg.lookback, companions).front();

  // Groups: 0 = target, 1 = replacement, 2.. = companions.
  std::vector<double> freqs{target_omega, replacement};
  freqs.insert(freqs.end(), companions.begin(), companions.end());
  Rng train_rng = Rng::derive(seed, 1);
  const Dataset all = generator::standardize(
      sine_dataset(freqs, cfg.channels_per_frequency, cfg.series_length, train_rng));
  Rng test_rng = Rng::derive(seed, 2);
  const Dataset test = generator::standardize(
      sine_dataset(std::span(freqs.data(), 1), cfg.channels_per_frequency, cfg.test_length, test_rng));

  std::vector<int> with_groups{0}, without_groups{1};
  for (int g = 2; g < static_cast<int>(freqs.size()); ++g) {
    with_groups.push_back(g);
    without_groups.push_back(g);
  }
  const std::uint64_t window_seed = Rng::derive(seed, 3).next_u64();
  const auto with_model = fit_on(take_groups(all, with_groups, cfg.channels_per_frequency), cfg, window_seed);
  const auto without_model = fit_on(take_groups(all, without_groups, cfg.channels_per_frequency), cfg, window_seed);

  GeneralizationResult result;
  result.mse_with = test_mse(with_model, test, cfg.lookback, cfg.horizon);
  result.mse_without = test_mse(without_model, test, cfg.lookback, cfg.horizon);
  for (int g : with_groups) result.train_with.push_back(freqs[static_cast<std::size_t>(g)]);
  for (int g : without_groups) result.train_without.push_back(freqs[static_cast<std::size_t>(g)]);
  return result;
}

SweepTarget synthetic_target(std::string id, double omega_bar, int harmonics, std::uint64_t seed, Eigen::Index length,
                             int channels) {
  generator::GeneratorConfig cfg;
  cfg.omega_bar = omega_bar;
  cfg.h = harmonics;
  cfg.n = length;
  cfg.d = channels;
  cfg.seed = seed;
  return {std::move(id), generator::synthesize(cfg), omega_bar};
}

namespace {

generator::FreqSynthOptions synth_options(const SynthExperimentConfig& cfg) {
  generator::FreqSynthOptions opts;
  opts.count_train = cfg.count_train;
  opts.count_val = 0;
  opts.lookback = cfg.lookback;
  opts.horizon = cfg.horizon;
  return opts;
}

} // namespace

std::vector<HarmonicsRow> harmonics_sweep(std::span<const int> h_values, std::span<const SweepTarget> targets,
                                          std::uint64_t seed, const SynthExperimentConfig& cfg) {
  std::vector<Splits> prepared;
  for (const auto& t : targets) prepared.push_back(prepare(t.data, cfg.split, cfg.lookback + cfg.horizon));

  const std::size_t cells = h_values.size() * targets.size();
  std::vector<HarmonicsRow> rows(cells);
  parallel_for(cells, [&](std::size_t cell) {
    const std::size_t hi = cell / targets.size();
    const std::size_t ti = cell % targets.size();
    const int h = h_values[hi];
    if (h < 1) throw Error(ErrorCode::InvalidConfig, "harmonic counts must be >= 1");
    auto opts = synth_options(cfg);
    opts.h_values.clear();
    for (int k = 1; k <= h; ++k) opts.h_values.push_back(k);
    const auto bundle = generator::freq_synth(targets[ti].omega_bar, seed, opts);
    const auto model = forecast::fit_ridge(bundle.windows.train, cfg.lambda);
    rows[cell] = {h, targets[ti].id, test_mse(model, prepared[ti].test, cfg.lookback, cfg.horizon)};
  });
  return rows;
}

Matrix size_variates_sweep(std::span<const Eigen::Index> sizes, std::span<const int> d_values,
                           const SweepTarget& target, std::uint64_t seed, const SynthExperimentConfig& cfg) {
  const Splits prepared = prepare(target.data, cfg.split, cfg.lookback + cfg.horizon);
  Matrix grid(static_cast<Eigen::Index>(sizes.size()), static_cast<Eigen::Index>(d_values.size()));
  parallel_for(sizes.size() * d_values.size(), [&](std::size_t cell) {
    const std::size_t si = cell / d_values.size();
    const std::size_t di = cell % d_values.size();
    auto opts = synth_options(cfg);
    opts.count_train = sizes[si];
    opts.base.d = d_values[di];
    const auto bundle = generator::freq_synth(target.omega_bar, seed, opts);
    const auto model = forecast::fit_ridge(bundle.windows.train, cfg.lambda);
    grid(static_cast<Eigen::Index>(si), static_cast<Eigen::Index>(di)) =
        test_mse(model, prepared.test, cfg.lookback, cfg.horizon);
  });
  return grid;
}

namespace {

// A `fraction` of the rows of `windows`, chosen without replacement.
RowMatrix subsample_rows(const generator::WindowSet& windows, double fraction, Rng& rng) {
  const Eigen::Index total = windows.size();
  const Eigen::Index keep = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(total))), 1, total);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), 0);
  for (Eigen::Index i = 0; i < keep; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(total - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  RowMatrix out(keep, windows.values.cols());
  for (Eigen::Index i = 0; i < keep; ++i) out.row(i) = windows.values.row(idx[static_cast<std::size_t>(i)]);
  return out;
}

} // namespace

FewShotResult fewshot_experiment(double source_omega, const SweepTarget& target, std::uint64_t seed, double fraction,
                                 double anchor, const SynthExperimentConfig& cfg) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorCode::InvalidConfig, "fraction must lie in (0, 1]");
  const auto bundle = generator::freq_synth(source_omega, seed, synth_options(cfg));
  const auto pretrained = forecast::fit_ridge(bundle.windows.train, cfg.lambda);

  const Splits prepared = prepare(target.data, cfg.split, cfg.lookback + cfg.horizon);
  Rng rng = Rng::derive(seed, 11);
  const RowMatrix from_train = subsample_rows(generator::all_windows(prepared.train, cfg.lookback, cfg.horizon), fraction, rng);
  const RowMatrix from_val = subsample_rows(generator::all_windows(prepared.val, cfg.lookback, cfg.horizon), fraction, rng);

  generator::WindowSet fewshot;
  fewshot.lookback_len = cfg.lookback;
  fewshot.horizon_len = cfg.horizon;
  fewshot.values.resize(from_train.rows() + from_val.rows(), cfg.lookback + cfg.horizon);
  fewshot.values << from_train, from_val;

  const auto tuned = forecast::finetune(pretrained, fewshot, anchor);
  return {test_mse(pretrained, prepared.test, cfg.lookback, cfg.horizon),
          test_mse(tuned, prepared.test, cfg.lookback, cfg.horizon), fewshot.size()};
}

std::vector<NamedDataset> synthetic_registry(std::uint64_t seed, int channels, Eigen::Index length) {
  constexpr struct {
    const char* tag;
    double omega;
  } kFundamentals[] = {{"w7", 1.0 / 7.0}, {"w24", 1.0 / 24.0}, {"w96", 1.0 / 96.0}};

  std::vector<NamedDataset> out;
  std::uint64_t index = 0;
  for (const auto& f : kFundamentals) {
    generator::GeneratorConfig cfg;
    cfg.omega_bar = f.omega;
    cfg.h = 3;
    cfg.d = channels;
    cfg.n = length;
    cfg.seed = Rng::derive(seed, index++).next_u64();
    const auto pool = generator::build_pool(cfg);
    for (const char* sibling : {"a", "b"}) {
      auto sib = cfg;
      sib.seed = Rng::derive(seed, index++).next_u64();
      Dataset ds = generator::synthesize_from_pool(pool, sib);
      out.push_back({fmt::format("{}-{}", f.tag, sibling), std::move(ds)});
    }
  }
  return out;
}

Trainer ridge_trainer(std::uint64_t seed, Eigen::Index lookback, Eigen::Index horizon, Eigen::Index count_train,
                      double lambda) {
  return [=](const Dataset& train, std::size_t index) {
    const Eigen::Index available = train.channels() * (train.length() - lookback - horizon + 1);
    const auto windows = generator::sample_windows(std::span(&train, 1), std::min(count_train, available), 0, lookback,
                                                   horizon, Rng::derive(seed, 500 + index).next_u64());
    return forecast::ridge_model(forecast::fit_ridge(windows.train, lambda));
  };
}

TransferSummary transfer_experiment(std::span<const NamedDataset> datasets, std::uint64_t seed, Eigen::Index lookback,
                                    Eigen::Index horizon) {
  TransferSummary s;
  s.matrix = transfer_matrix(datasets, ridge_trainer(seed, lookback, horizon), lookback, horizon);
  const auto k = static_cast<Eigen::Index>(datasets.size());
  s.pcc = Matrix::Identity(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = r + 1; c < k; ++c) {
      s.pcc(r, c) = s.pcc(c, r) = spectral::dataset_pcc(datasets[static_cast<std::size_t>(r)].data,
                                                         datasets[static_cast<std::size_t>(c)].data);
    }
  }
  double high = 0.0, low = 0.0;
  s.high_cells = s.low_cells = 0;
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      if (r == c) continue;
      if (s.pcc(r, c) >= 0.9) {
        high += s.matrix.scaled(r, c);
        ++s.high_cells;
      } else if (s.pcc(r, c) < 0.5) {
        low += s.matrix.scaled(r, c);
        ++s.low_cells;
      }
    }
  }
  s.mean_scaled_high = s.high_cells ? high / s.high_cells : std::nan("");
  s.mean_scaled_low = s.low_cells ? low / s.low_cells : std::nan("");
  return s;
}

} // namespace freqsynth::eval

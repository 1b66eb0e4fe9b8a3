#include "freqsynth/generator.hpp"

#include "freqsynth/error.hpp"
#include "freqsynth/parallel.hpp"
#include "freqsynth/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

namespace freqsynth::generator {

void GeneratorConfig::validate() const {
  if (!(omega_bar > 0.0 && omega_bar < 0.5)) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("omega_bar must lie in (0, 0.5), got {}", omega_bar));
  }
  if (m < 1) throw Error(ErrorCode::InvalidConfig, "pool size m must be >= 1");
  if (h < 1) throw Error(ErrorCode::InvalidConfig, "harmonic count h must be >= 1");
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw Error(ErrorCode::InvalidConfig, "expected amplitude A' must be positive");
  }
  if (l < 1) throw Error(ErrorCode::InvalidConfig, "l must be >= 1");
  if (n < 2) throw Error(ErrorCode::InvalidConfig, "series length n must be >= 2");
  if (d < 1) throw Error(ErrorCode::InvalidConfig, "channel count d must be >= 1");
}

std::vector<double> harmonic_set(double omega_bar, int h) {
  if (!(omega_bar > 0.0 && omega_bar < 0.5) || h < 1) {
    throw Error(ErrorCode::InvalidConfig, "harmonic_set needs 0 < omega_bar < 0.5 and h >= 1");
  }
  std::vector<double> set;
  for (int k = 1; k <= h; ++k) {
    const double w = omega_bar * k;
    if (w < 0.5) set.push_back(w);
  }
  return set;
}

namespace {

void check_amplitude(double amplitude) {
  if (!(amplitude > kAmplitudeFloor)) {
    throw Error(ErrorCode::InvalidAmplitudeScale,
                fmt::format("expected amplitude must exceed {}, got {}", kAmplitudeFloor, amplitude));
  }
}

template <typename FrequencyDraw>
std::vector<SineSpec> draw_pool(const GeneratorConfig& cfg, FrequencyDraw&& frequency) {
  Rng rng = Rng::derive(cfg.seed, 0);
  std::vector<SineSpec> pool;
  pool.reserve(static_cast<std::size_t>(cfg.m));
  for (int k = 0; k < cfg.m; ++k) {
    SineSpec s{};
    s.amplitude = rng.exponential(cfg.amplitude - kAmplitudeFloor) + kAmplitudeFloor;
    s.frequency = frequency(rng);
    s.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    pool.push_back(s);
  }
  return pool;
}

} // namespace

std::vector<SineSpec> build_pool(const GeneratorConfig& cfg) {
  cfg.validate();
  check_amplitude(cfg.amplitude);
  const auto set = harmonic_set(cfg.omega_bar, cfg.h);
  return draw_pool(cfg, [&](Rng& rng) { return set[rng.below(set.size())]; });
}

std::vector<SineSpec> build_mix_pool(const GeneratorConfig& cfg) {
  cfg.validate();
  check_amplitude(cfg.amplitude);
  return draw_pool(cfg, [](Rng& rng) {
    double w = 0.0;
    do {
      w = rng.uniform(kMixMinFrequency, 0.5);
    } while (w <= kMixMinFrequency);
    return w;
  });
}

Vector render(const SineSpec& sine, Eigen::Index n) {
  Vector out(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    double cycles = static_cast<double>(t) * sine.frequency;
    cycles -= std::floor(cycles);
    out[t] = sine.amplitude * std::sin(2.0 * std::numbers::pi * cycles + sine.phase);
  }
  return out;
}

Dataset synthesize_from_pool(std::span<const SineSpec> pool, const GeneratorConfig& cfg) {
  cfg.validate();
  if (pool.empty()) throw Error(ErrorCode::InvalidConfig, "empty sine pool");

  const auto m = static_cast<Eigen::Index>(pool.size());
  const Eigen::Index n = cfg.n;

  // Member draws first, so the RNG stream per channel is fixed regardless
  // of how the rendering is scheduled.
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(cfg.d));
  for (int c = 0; c < cfg.d; ++c) {
    Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(c) + 1);
    auto& idx = members[static_cast<std::size_t>(c)];
    idx.resize(static_cast<std::size_t>(cfg.l));
    for (auto& i : idx) i = rng.below(pool.size());
  }

  RowMatrix values = RowMatrix::Zero(cfg.d, n);
  const bool prerender = static_cast<Eigen::Index>(cfg.d) * cfg.l > m;
  if (prerender) {
    RowMatrix rendered(m, n);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t k) {
      rendered.row(static_cast<Eigen::Index>(k)) = render(pool[k], n).transpose();
    });
    parallel_for(static_cast<std::size_t>(cfg.d), [&](std::size_t c) {
      auto row = values.row(static_cast<Eigen::Index>(c));
      for (auto i : members[c]) row += rendered.row(static_cast<Eigen::Index>(i));
    });
  } else {
    parallel_for(static_cast<std::size_t>(cfg.d), [&](std::size_t c) {
      auto row = values.row(static_cast<Eigen::Index>(c));
      for (auto i : members[c]) row += render(pool[i], n).transpose();
    });
  }

  Dataset ds = make_dataset(std::move(values));
  ds.provenance = fmt::format("freqsynth omega_bar={:.17g} m={} h={} A'={:.17g} l={} n={} d={} seed={}",
                              cfg.omega_bar, cfg.m, cfg.h, cfg.amplitude, cfg.l, cfg.n, cfg.d, cfg.seed);
  return ds;
}

Dataset synthesize(const GeneratorConfig& cfg) {
  const auto pool = build_pool(cfg);
  return synthesize_from_pool(pool, cfg);
}

Dataset standardize(const Dataset& ds) {
  return apply_stats(ds, channel_stats(ds));
}

namespace {

WindowSet make_window_set(std::span<const Dataset> sources, std::span<const WindowSource> picks,
                          Eigen::Index lookback, Eigen::Index horizon) {
  WindowSet set;
  set.lookback_len = lookback;
  set.horizon_len = horizon;
  set.values.resize(static_cast<Eigen::Index>(picks.size()), lookback + horizon);
  set.sources.assign(picks.begin(), picks.end());
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const auto& p = picks[i];
    set.values.row(static_cast<Eigen::Index>(i)) =
        sources[static_cast<std::size_t>(p.dataset)].values.row(p.channel).segment(p.start, lookback + horizon);
  }
  return set;
}

void check_window(Eigen::Index lookback, Eigen::Index horizon) {
  if (lookback < 1 || horizon < 1) throw Error(ErrorCode::InvalidWindow, "lookback and horizon must be >= 1");
}

} // namespace

WindowSplit sample_windows(std::span<const Dataset> sources, Eigen::Index count_train, Eigen::Index count_val,
                           Eigen::Index lookback, Eigen::Index horizon, std::uint64_t seed) {
  check_window(lookback, horizon);
  if (sources.empty()) throw Error(ErrorCode::EmptyDataset, "no source datasets");
  if (count_train < 0 || count_val < 0) throw Error(ErrorCode::InvalidConfig, "window counts must be >= 0");

  // Flattened (dataset, channel, start) index space.
  std::vector<std::uint64_t> offsets{0};
  for (const auto& ds : sources) {
    const Eigen::Index starts = ds.length() - (lookback + horizon) + 1;
    if (starts < 1) {
      throw Error(ErrorCode::WindowTooLong,
                  fmt::format("window length {} exceeds series length {}", lookback + horizon, ds.length()));
    }
    offsets.push_back(offsets.back() + static_cast<std::uint64_t>(starts * ds.channels()));
  }
  const std::uint64_t available = offsets.back();
  const auto wanted = static_cast<std::uint64_t>(count_train + count_val);
  if (wanted > available) {
    throw Error(ErrorCode::InsufficientData,
                fmt::format("requested {} windows but only {} distinct windows exist", wanted, available));
  }

  // Floyd's sampling: `wanted` distinct indices, then a shuffle so the
  // train/val assignment is uniform.
  Rng rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  std::vector<std::uint64_t> order;
  chosen.reserve(static_cast<std::size_t>(wanted) * 2);
  order.reserve(static_cast<std::size_t>(wanted));
  for (std::uint64_t j = available - wanted; j < available; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    const std::uint64_t pick = chosen.insert(t).second ? t : j;
    if (pick == j) chosen.insert(j);
    order.push_back(pick);
  }
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  std::vector<WindowSource> picks;
  picks.reserve(order.size());
  for (const auto flat : order) {
    const auto it = std::upper_bound(offsets.begin(), offsets.end(), flat);
    const auto di = static_cast<std::size_t>(it - offsets.begin() - 1);
    const std::uint64_t local = flat - offsets[di];
    const auto starts = static_cast<std::uint64_t>(sources[di].length() - (lookback + horizon) + 1);
    picks.push_back({static_cast<int>(di), static_cast<int>(local / starts), static_cast<Eigen::Index>(local % starts)});
  }

  const auto split_at = picks.begin() + count_train;
  WindowSplit out;
  out.train = make_window_set(sources, std::span(picks.begin(), split_at), lookback, horizon);
  out.val = make_window_set(sources, std::span(split_at, picks.end()), lookback, horizon);
  return out;
}

WindowSet all_windows(const Dataset& ds, Eigen::Index lookback, Eigen::Index horizon) {
  check_window(lookback, horizon);
  const Eigen::Index starts = ds.length() - (lookback + horizon) + 1;
  if (starts < 1) {
    throw Error(ErrorCode::WindowTooLong,
                fmt::format("window length {} exceeds series length {}", lookback + horizon, ds.length()));
  }
  std::vector<WindowSource> picks;
  picks.reserve(static_cast<std::size_t>(starts * ds.channels()));
  for (Eigen::Index c = 0; c < ds.channels(); ++c) {
    for (Eigen::Index s = 0; s < starts; ++s) picks.push_back({0, static_cast<int>(c), s});
  }
  return make_window_set(std::span(&ds, 1), picks, lookback, horizon);
}

namespace {

GeneratorConfig dataset_config(const FreqSynthOptions& opts, double omega_bar, int h, std::uint64_t seed,
                               std::uint64_t index) {
  GeneratorConfig cfg = opts.base;
  cfg.omega_bar = omega_bar;
  cfg.h = h;
  cfg.seed = Rng::derive(seed, 1000 + index).next_u64();
  return cfg;
}

void finish(SynthBundle& bundle, const FreqSynthOptions& opts, std::uint64_t seed) {
  bundle.windows = sample_windows(bundle.datasets, opts.count_train, opts.count_val, opts.lookback, opts.horizon,
                                  Rng::derive(seed, 7).next_u64());
}

void check_lengths(const FreqSynthOptions& opts) {
  if (opts.lookback + opts.horizon > opts.base.n) {
    throw Error(ErrorCode::WindowTooLong, fmt::format("window length {} exceeds series length {}",
                                                      opts.lookback + opts.horizon, opts.base.n));
  }
  if (opts.h_values.empty()) throw Error(ErrorCode::InvalidConfig, "h_values must not be empty");
}

} // namespace

SynthBundle freq_synth(double omega_bar, std::uint64_t seed, const FreqSynthOptions& opts) {
  check_lengths(opts);
  SynthBundle bundle;
  for (std::size_t i = 0; i < opts.h_values.size(); ++i) {
    const auto cfg = dataset_config(opts, omega_bar, opts.h_values[i], seed, i);
    bundle.datasets.push_back(standardize(synthesize(cfg)));
    bundle.fundamentals.push_back(omega_bar);
    bundle.harmonics.push_back(opts.h_values[i]);
  }
  finish(bundle, opts, seed);
  return bundle;
}

SynthBundle freq_synth_natural(std::uint64_t seed, const FreqSynthOptions& opts) {
  check_lengths(opts);
  SynthBundle bundle;
  std::uint64_t index = 0;
  for (const double omega : kNaturalFundamentals) {
    for (const int h : opts.h_values) {
      const auto cfg = dataset_config(opts, omega, h, seed, index++);
      bundle.datasets.push_back(standardize(synthesize(cfg)));
      bundle.fundamentals.push_back(omega);
      bundle.harmonics.push_back(h);
    }
  }
  finish(bundle, opts, seed);
  return bundle;
}

SynthBundle freq_synth_mix(std::uint64_t seed, const FreqSynthOptions& opts) {
  check_lengths(opts);
  SynthBundle bundle;
  for (std::size_t i = 0; i < opts.h_values.size(); ++i) {
    // omega_bar is unused by the mix pool but must stay valid for validation.
    const auto cfg = dataset_config(opts, 0.25, 1, seed, i);
    const auto pool = build_mix_pool(cfg);
    Dataset ds = synthesize_from_pool(pool, cfg);
    ds.provenance = fmt::format("freqsynth-mix m={} A'={:.17g} l={} n={} d={} seed={}", cfg.m, cfg.amplitude,
                                cfg.l, cfg.n, cfg.d, cfg.seed);
    bundle.datasets.push_back(standardize(ds));
    bundle.fundamentals.push_back(0.0);
    bundle.harmonics.push_back(0);
  }
  finish(bundle, opts, seed);
  return bundle;
}

} // namespace freqsynth::generator

#include "freqsynth/cli.hpp"

#include "freqsynth/dataio.hpp"
#include "freqsynth/error.hpp"
#include "freqsynth/eval.hpp"
#include "freqsynth/experiments.hpp"
#include "freqsynth/forecast.hpp"
#include "freqsynth/freqest.hpp"
#include "freqsynth/generator.hpp"
#include "freqsynth/plot.hpp"
#include "freqsynth/spectral.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fmt/format.h>

#include <chrono>
#include <functional>
#include <ostream>

namespace freqsynth::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

SamplingRate parse_rate(const std::string& token) {
  try {
    return SamplingRate::parse(token);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

// Flags shared by several subcommands.
struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string plot;
  std::string rate;
  double omega = 0.0;
  CLI::Option* omega_opt = nullptr;
  CLI::Option* rate_opt = nullptr;
};

void add_seed_out(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "RNG seed (u64)")->capture_default_str();
  sub->add_option("--out", c.out, "Output path (stdout when omitted)");
}

void add_frequency(CLI::App* sub, Common& c) {
  c.omega_opt = sub->add_option("--omega", c.omega, "Fundamental frequency in cycles/step, in (0, 0.5)");
  c.rate_opt = sub->add_option("--rate", c.rate, "Sampling-rate token (4s,1m,5m,10m,15m,30m,1h,1d,custom:<k>)");
  c.omega_opt->excludes(c.rate_opt);
}

double resolve_omega(const Common& c, std::optional<double> fallback = std::nullopt) {
  if (c.rate_opt && c.rate_opt->count()) return parse_rate(c.rate).frequency();
  if (c.omega_opt && c.omega_opt->count()) {
    require(c.omega > 0.0 && c.omega < 0.5, "--omega must lie in (0, 0.5)");
    return c.omega;
  }
  require(fallback.has_value(), "one of --omega or --rate is required");
  return *fallback;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    dataio::write_atomic(path, content);
  }
}

fs::path sibling(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return p.parent_path() / (p.stem().string() + suffix);
}

void maybe_plot(const std::string& path, std::span<const double> x, std::span<const double> y, std::string_view title,
                bool log_y) {
  if (!path.empty()) dataio::write_atomic(path, plot::line_plot_svg(x, y, title, log_y));
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

// ---- generate ----

struct GenerateArgs {
  Common c;
  std::string config;
  generator::GeneratorConfig cfg;
  bool standardize = false;
};

void setup_generate(CLI::App& app, GenerateArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sub = app.add_subcommand("generate", "Synthesize one harmonic dataset as LTSF CSV");
  add_seed_out(sub, a.c);
  add_frequency(sub, a.c);
  sub->add_option("--config", a.config, "JSON config with keys omega_bar, rate, m, h, A_prime, l, n, d, seed");
  sub->add_option("--h", a.cfg.h, "Highest harmonic")->capture_default_str();
  sub->add_option("--m", a.cfg.m, "Pool size")->capture_default_str();
  sub->add_option("--amplitude", a.cfg.amplitude, "Expected amplitude A'")->capture_default_str();
  sub->add_option("--l", a.cfg.l, "Sines summed per channel")->capture_default_str();
  sub->add_option("--n", a.cfg.n, "Series length")->capture_default_str();
  sub->add_option("--d", a.cfg.d, "Channel count")->capture_default_str();
  sub->add_flag("--standardize", a.standardize, "Standardize each channel");
  sub->callback([&, sub] {
    action = [&, sub] {
      generator::GeneratorConfig cfg = a.cfg;
      std::optional<double> config_omega;
      if (!a.config.empty()) {
        json doc;
        try {
          doc = json::parse(dataio::read_text(a.config));
        } catch (const json::exception& e) {
          throw UsageError(fmt::format("bad --config JSON: {}", e.what()));
        }
        require(doc.is_object(), "--config must hold a JSON object");
        for (const auto& [key, value] : doc.items()) {
          auto set_int = [&](auto& field, const char* flag) {
            if (!sub->get_option(flag)->count()) field = value.get<std::decay_t<decltype(field)>>();
          };
          try {
            if (key == "omega_bar") config_omega = value.get<double>();
            else if (key == "rate") config_omega = parse_rate(value.get<std::string>()).frequency();
            else if (key == "m") set_int(cfg.m, "--m");
            else if (key == "h") set_int(cfg.h, "--h");
            else if (key == "A_prime") set_int(cfg.amplitude, "--amplitude");
            else if (key == "l") set_int(cfg.l, "--l");
            else if (key == "n") set_int(cfg.n, "--n");
            else if (key == "d") set_int(cfg.d, "--d");
            else if (key == "seed") {
              if (!sub->get_option("--seed")->count()) a.c.seed = value.get<std::uint64_t>();
            } else throw UsageError(fmt::format("unknown --config key '{}'", key));
          } catch (const json::exception& e) {
            throw UsageError(fmt::format("bad --config value for '{}': {}", key, e.what()));
          }
        }
      }
      cfg.omega_bar = resolve_omega(a.c, config_omega);
      cfg.seed = a.c.seed;
      try {
        cfg.validate();
        if (cfg.amplitude <= generator::kAmplitudeFloor) throw UsageError("--amplitude must exceed 0.01");
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      require(!a.c.out.empty(), "--out is required");

      Dataset ds = generator::synthesize(cfg);
      if (a.standardize) ds = generator::standardize(ds);
      dataio::save_csv(ds, a.c.out);
      out << fmt::format("wrote {} channels x {} steps to {}\n", ds.channels(), ds.length(), a.c.out);
    };
  });
}

// ---- periodogram ----

struct PeriodogramArgs {
  Common c;
  std::string input;
  Eigen::Index window = 0;
};

void setup_periodogram(CLI::App& app, PeriodogramArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sub = app.add_subcommand("periodogram", "Aggregate scaled periodogram of a CSV dataset");
  add_seed_out(sub, a.c);
  sub->add_option("--input", a.input, "LTSF CSV input")->required();
  sub->add_option("--window", a.window, "Window length (default: 1024 or the largest power of two <= n)");
  sub->add_option("--plot", a.c.plot, "Also write an SVG plot to this path");
  sub->callback([&] {
    action = [&] {
      require(a.window == 0 || a.window >= spectral::kMinAggregateWindow, "--window must be >= 16");
      const Dataset ds = dataio::load_csv(a.input);
      const Eigen::Index w = a.window ? a.window : spectral::default_window(ds.length());
      const auto p = spectral::aggregate_periodogram(ds, w);
      emit(a.c.out, dataio::format_periodogram_csv(p), out);
      maybe_plot(a.c.plot, std::span(p.freqs.data(), p.freqs.size()), std::span(p.powers.data(), p.powers.size()),
                 "periodogram", false);
    };
  });
}

// ---- estimate ----

struct EstimateArgs {
  Common c;
  std::string input;
  double threshold = freqest::kDefaultRelThreshold;
  int bin_tol = freqest::kDefaultBinTolerance;
};

void setup_estimate(CLI::App& app, EstimateArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sub = app.add_subcommand("estimate", "Fundamental frequency from a sampling rate or a dataset periodogram");
  add_seed_out(sub, a.c);
  auto* rate = sub->add_option("--rate", a.c.rate, "Sampling-rate token; takes precedence over --input");
  auto* input = sub->add_option("--input", a.input, "LTSF CSV input for periodogram estimation");
  sub->add_option("--threshold", a.threshold, "Peak threshold relative to the strongest bin")->capture_default_str();
  sub->add_option("--bin-tol", a.bin_tol, "Harmonic matching tolerance in bins")->capture_default_str();
  sub->callback([&, rate, input] {
    action = [&, rate, input] {
      require(rate->count() || input->count(), "one of --rate or --input is required");
      require(a.threshold > 0.0 && a.threshold <= 1.0, "--threshold must lie in (0, 1]");
      require(a.bin_tol >= 1, "--bin-tol must be >= 1");
      freqest::FundamentalEstimate est{};
      if (rate->count()) {
        est = freqest::freq_from_sampling_rate(parse_rate(a.c.rate));
      } else {
        est = freqest::estimate_fundamental(dataio::load_csv(a.input), a.threshold, a.bin_tol);
      }
      json doc{{"omega_bar", est.omega_bar}, {"source", freqest::to_string(est.source)}, {"confidence", est.confidence}};
      emit(a.c.out, doc.dump() + "\n", out);
    };
  });
}

// ---- similarity ----

struct SimilarityArgs {
  Common c;
  std::vector<std::string> inputs;
  std::string registry;
};

std::vector<eval::NamedDataset> load_named(const std::vector<std::string>& inputs, const std::string& registry) {
  std::vector<eval::NamedDataset> out;
  if (!registry.empty()) {
    for (const auto& e : dataio::load_registry(registry)) {
      if (e.path.empty()) throw Error(ErrorCode::InvalidConfig, fmt::format("registry entry '{}' has no path", e.id));
      Dataset ds = dataio::load_csv(e.path);
      ds.rate = e.rate;
      out.push_back({e.id, std::move(ds)});
    }
  }
  for (const auto& p : inputs) out.push_back({fs::path(p).stem().string(), dataio::load_csv(p)});
  return out;
}

void setup_similarity(CLI::App& app, SimilarityArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sub = app.add_subcommand("similarity", "Pairwise periodogram PCC matrix of datasets");
  add_seed_out(sub, a.c);
  sub->add_option("--inputs", a.inputs, "Comma-separated CSV inputs")->delimiter(',');
  sub->add_option("--registry", a.registry, "Dataset registry JSON");
  sub->callback([&] {
    action = [&] {
      require(a.inputs.size() + (a.registry.empty() ? 0 : 1) >= 1, "--inputs or --registry is required");
      const auto named = load_named(a.inputs, a.registry);
      require(named.size() >= 2, "similarity needs at least two datasets");
      const auto k = static_cast<Eigen::Index>(named.size());
      Eigen::MatrixXd pcc = Eigen::MatrixXd::Identity(k, k);
      for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index col = r + 1; col < k; ++col) {
          pcc(r, col) = pcc(col, r) = spectral::dataset_pcc(named[static_cast<std::size_t>(r)].data,
                                                            named[static_cast<std::size_t>(col)].data);
        }
      }
      std::vector<std::string> ids;
      for (const auto& n : named) ids.push_back(n.id);
      emit(a.c.out, dataio::format_matrix_csv(ids, ids, pcc), out);
    };
  });
}

// ---- fit ----

struct FitArgs {
  Common c;
  std::string variant = "freq-synth";
  std::string input;
  Eigen::Index lookback = 96;
  Eigen::Index horizon = 720;
  double lambda = forecast::kDefaultLambda;
  Eigen::Index windows = 5000;
  Eigen::Index length = 50'000;
  std::vector<int> h_values{1, 2, 3};
};

void setup_fit(CLI::App& app, FitArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sub = app.add_subcommand("fit", "Fit the ridge forecaster on Freq-Synth windows or a CSV train split");
  add_seed_out(sub, a.c);
  add_frequency(sub, a.c);
  sub->add_option("--variant", a.variant, "freq-synth | natural | mix")
      ->check(CLI::IsMember({"freq-synth", "natural", "mix"}))
      ->capture_default_str();
  sub->add_option("--input", a.input, "Train on the train split of this CSV instead of synthetic data");
  sub->add_option("--lookback", a.lookback, "Lookback length")->capture_default_str();
  sub->add_option("--horizon", a.horizon, "Model horizon")->capture_default_str();
  sub->add_option("--lambda", a.lambda, "Relative ridge coefficient")->capture_default_str();
  sub->add_option("--windows", a.windows, "Training windows")->capture_default_str();
  sub->add_option("--n", a.length, "Synthetic series length")->capture_default_str();
  sub->add_option("--h-values", a.h_values, "Harmonic counts, one dataset each")->delimiter(',');
  sub->callback([&] {
    action = [&] {
      require(!a.c.out.empty(), "--out is required");
      require(a.lookback >= 1 && a.horizon >= 1, "--lookback and --horizon must be >= 1");
      require(a.lambda >= 0.0, "--lambda must be >= 0");
      require(a.windows >= 1, "--windows must be >= 1");
      require(!a.h_values.empty() && *std::min_element(a.h_values.begin(), a.h_values.end()) >= 1,
              "--h-values must be positive");

      forecast::LinearForecaster model;
      if (!a.input.empty()) {
        const auto prepared = eval::prepare(dataio::load_csv(a.input), eval::kDefaultSplit, a.lookback + a.horizon);
        const Eigen::Index available = prepared.train.channels() * (prepared.train.length() - a.lookback - a.horizon + 1);
        const auto w = generator::sample_windows(std::span(&prepared.train, 1), std::min(a.windows, available), 0,
                                                 a.lookback, a.horizon, a.c.seed);
        model = forecast::fit_ridge(w.train, a.lambda);
      } else {
        generator::FreqSynthOptions opts;
        opts.count_train = a.windows;
        opts.count_val = 0;
        opts.lookback = a.lookback;
        opts.horizon = a.horizon;
        opts.h_values = a.h_values;
        opts.base.n = a.length;
        generator::SynthBundle bundle;
        if (a.variant == "natural") {
          bundle = generator::freq_synth_natural(a.c.seed, opts);
        } else if (a.variant == "mix") {
          bundle = generator::freq_synth_mix(a.c.seed, opts);
        } else {
          bundle = generator::freq_synth(resolve_omega(a.c), a.c.seed, opts);
        }
        model = forecast::fit_ridge(bundle.windows.train, a.lambda);
      }
      dataio::write_atomic(a.c.out, dataio::model_to_json(model));
      out << fmt::format("wrote {}x{} ridge model to {}\n", model.horizon_len, model.lookback_len + 1, a.c.out);
    };
  });
}

// ---- evaluate ----

struct EvaluateArgs {
  Common c;
  std::string model;
  std::string baseline;
  Eigen::Index period = 0;
  std::string input;
  std::vector<double> split{0.7, 0.2, 0.1};
  Eigen::Index lookback = 96;
  std::vector<Eigen::Index> horizons = eval::kDefaultHorizons;
  double fewshot = 0.0;
  double anchor = forecast::kDefaultAnchor;
};

generator::WindowSet fewshot_windows(const eval::Splits& prepared, Eigen::Index lookback, Eigen::Index horizon,
                                     double fraction, std::uint64_t seed) {
  std::vector<Dataset> parts{prepared.train, prepared.val};
  const Eigen::Index available =
      prepared.train.channels() * (prepared.train.length() - lookback - horizon + 1) +
      prepared.val.channels() * (prepared.val.length() - lookback - horizon + 1);
  const Eigen::Index count =
      std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(available))), 1,
                               available);
  return generator::sample_windows(parts, count, 0, lookback, horizon, seed).train;
}

void setup_evaluate(CLI::App& app, EvaluateArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sub = app.add_subcommand("evaluate", "Zero-shot (or few-shot) evaluation on a CSV target");
  add_seed_out(sub, a.c);
  auto* model = sub->add_option("--model", a.model, "Ridge model JSON");
  auto* baseline = sub->add_option("--baseline", a.baseline, "naive | snaive")->check(CLI::IsMember({"naive", "snaive"}));
  model->excludes(baseline);
  sub->add_option("--period", a.period, "Seasonal period for snaive (default: from --rate)");
  sub->add_option("--rate", a.c.rate, "Sampling-rate token of the target");
  sub->add_option("--input", a.input, "Target LTSF CSV")->required();
  sub->add_option("--split", a.split, "train,val,test fractions")->delimiter(',')->expected(3);
  sub->add_option("--lookback", a.lookback, "Lookback length")->capture_default_str();
  sub->add_option("--horizons", a.horizons, "Comma-separated horizons")->delimiter(',');
  sub->add_option("--fewshot", a.fewshot, "Fine-tune on this fraction of target train+val windows (0 = zero-shot)");
  sub->add_option("--anchor", a.anchor, "Few-shot anchor strength")->capture_default_str();
  sub->callback([&, model, baseline] {
    action = [&, model, baseline] {
      require(model->count() || baseline->count(), "one of --model or --baseline is required");
      require(!a.horizons.empty(), "--horizons must not be empty");
      require(*std::min_element(a.horizons.begin(), a.horizons.end()) >= 1, "--horizons must be positive");
      require(a.lookback >= 1, "--lookback must be >= 1");
      require(a.fewshot >= 0.0 && a.fewshot <= 1.0, "--fewshot must lie in [0, 1]");
      require(a.anchor >= 0.0, "--anchor must be >= 0");
      const eval::SplitSpec spec{a.split[0], a.split[1], a.split[2]};
      try {
        spec.validate();
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      Eigen::Index period = a.period;
      if (a.baseline == "snaive" && period == 0) {
        require(!a.c.rate.empty(), "snaive needs --period or --rate");
        period = parse_rate(a.c.rate).steps_per_cycle();
      } else if (!a.c.rate.empty()) {
        parse_rate(a.c.rate);
      }
      require(a.baseline != "snaive" || period >= 1, "--period must be >= 1");
      require(a.fewshot == 0.0 || model->count(), "--fewshot needs --model");
      const Eigen::Index longest = *std::max_element(a.horizons.begin(), a.horizons.end());

      const Dataset target = dataio::load_csv(a.input);
      const std::string id = fs::path(a.input).stem().string();
      const auto prepared = eval::prepare(target, spec, 1);

      forecast::Forecaster forecaster;
      if (model->count()) {
        auto m = dataio::model_from_json(dataio::read_text(a.model));
        if (m.lookback_len != a.lookback) {
          throw Error(ErrorCode::InvalidWindow,
                      fmt::format("model lookback {} differs from --lookback {}", m.lookback_len, a.lookback));
        }
        if (m.horizon_len < longest) {
          throw Error(ErrorCode::InvalidWindow,
                      fmt::format("model horizon {} is shorter than requested horizon {}", m.horizon_len, longest));
        }
        if (a.fewshot > 0.0) {
          m = forecast::finetune(m, fewshot_windows(prepared, m.lookback_len, m.horizon_len, a.fewshot, a.c.seed),
                                 a.anchor);
        }
        forecaster = forecast::ridge_model(std::move(m), a.fewshot > 0.0 ? "ridge-fewshot" : "ridge");
      } else if (a.baseline == "naive") {
        forecaster = forecast::naive_model();
      } else {
        forecaster = forecast::seasonal_naive_model(period);
      }

      const auto reports = eval::evaluate_zero_shot(forecaster, prepared.test, id, a.lookback, a.horizons, a.c.seed);
      emit(a.c.out, dataio::reports_to_json(reports), out);
      if (!a.c.out.empty()) dataio::write_atomic(sibling(a.c.out, ".csv"), dataio::reports_to_csv(reports));
    };
  });
}

// ---- confusion / generalization ----

struct ConfusionArgs {
  Common c;
  std::vector<int> counts = eval::kDefaultDistractorCounts;
  double lambda = forecast::kDefaultLambda;
  Eigen::Index lookback = 96;
  Eigen::Index horizon = 96;
};

void setup_confusion(CLI::App& app, ConfusionArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sub = app.add_subcommand("confusion", "Test MSE on a base sine as distractor frequencies are added");
  add_seed_out(sub, a.c);
  add_frequency(sub, a.c);
  sub->add_option("--counts", a.counts, "Distractor counts")->delimiter(',');
  sub->add_option("--lambda", a.lambda, "Relative ridge coefficient")->capture_default_str();
  sub->add_option("--lookback", a.lookback, "Lookback length")->capture_default_str();
  sub->add_option("--horizon", a.horizon, "Forecast horizon")->capture_default_str();
  sub->add_option("--plot", a.c.plot, "Also write an SVG plot (log MSE) to this path");
  sub->callback([&] {
    action = [&] {
      const double omega = resolve_omega(a.c, 1.0 / 24.0);
      require(!a.counts.empty() && *std::min_element(a.counts.begin(), a.counts.end()) >= 0,
              "--counts must be nonnegative");
      require(a.lambda >= 0.0, "--lambda must be >= 0");
      eval::SineExperimentConfig cfg;
      cfg.lambda = a.lambda;
      cfg.lookback = a.lookback;
      cfg.horizon = a.horizon;
      const auto curve = eval::confusion_experiment(omega, a.counts, a.c.seed, cfg);
      std::string csv = "count,mse\n";
      std::vector<double> xs, ys;
      for (const auto& p : curve) {
        csv += fmt::format("{},{}\n", p.distractors, fmt_double(p.mse));
        xs.push_back(p.distractors);
        ys.push_back(p.mse);
      }
      emit(a.c.out, csv, out);
      maybe_plot(a.c.plot, xs, ys, "test MSE vs added frequencies", true);
    };
  });
}

struct GeneralizationArgs {
  Common c;
  double lambda = forecast::kDefaultLambda;
};

void setup_generalization(CLI::App& app, GeneralizationArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sub = app.add_subcommand("generalization", "Test MSE with and without the target frequency in training");
  add_seed_out(sub, a.c);
  add_frequency(sub, a.c);
  sub->add_option("--lambda", a.lambda, "Relative ridge coefficient")->capture_default_str();
  sub->callback([&] {
    action = [&] {
      const double omega = resolve_omega(a.c, 1.0 / 24.0);
      require(a.lambda >= 0.0, "--lambda must be >= 0");
      eval::SineExperimentConfig cfg;
      cfg.lambda = a.lambda;
      const auto r = eval::generalization_experiment(omega, a.c.seed, cfg);
      json doc{{"target", omega},
               {"mse_with", r.mse_with},
               {"mse_without", r.mse_without},
               {"train_with", r.train_with},
               {"train_without", r.train_without},
               {"seed", a.c.seed}};
      emit(a.c.out, doc.dump(2) + "\n", out);
    };
  });
}

// ---- transfer ----

struct TransferArgs {
  Common c;
  std::vector<std::string> inputs;
  std::string registry;
  bool synthetic = false;
  Eigen::Index lookback = 96;
  Eigen::Index horizon = 96;
};

void setup_transfer(CLI::App& app, TransferArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sub = app.add_subcommand("transfer", "Cross-dataset transfer matrix of ridge forecasters");
  add_seed_out(sub, a.c);
  sub->add_option("--inputs", a.inputs, "Comma-separated CSV inputs")->delimiter(',');
  sub->add_option("--registry", a.registry, "Dataset registry JSON");
  sub->add_flag("--synthetic", a.synthetic, "Use the built-in six-dataset synthetic registry");
  sub->add_option("--lookback", a.lookback, "Lookback length")->capture_default_str();
  sub->add_option("--horizon", a.horizon, "Forecast horizon")->capture_default_str();
  sub->callback([&] {
    action = [&] {
      require(a.synthetic || !a.inputs.empty() || !a.registry.empty(), "--inputs, --registry or --synthetic required");
      auto named = a.synthetic ? eval::synthetic_registry(a.c.seed) : load_named(a.inputs, a.registry);
      require(named.size() >= 2, "transfer needs at least two datasets");
      const auto summary = eval::transfer_experiment(named, a.c.seed, a.lookback, a.horizon);
      const auto& ids = summary.matrix.ids;
      const std::string raw = dataio::format_matrix_csv(ids, ids, summary.matrix.raw);
      emit(a.c.out, raw, out);
      if (!a.c.out.empty()) {
        dataio::write_atomic(sibling(a.c.out, ".scaled.csv"), dataio::format_matrix_csv(ids, ids, summary.matrix.scaled));
        dataio::write_atomic(sibling(a.c.out, ".pcc.csv"), dataio::format_matrix_csv(ids, ids, summary.pcc));
      }
    };
  });
}

// ---- sweeps ----

struct SweepArgs {
  Common c;
  std::vector<std::string> inputs;
  std::vector<int> h_values = eval::kDefaultHarmonicValues;
  std::vector<Eigen::Index> sizes{1000, 5000, 10000};
  std::vector<int> d_values{1, 3, 5, 10};
  Eigen::Index windows = 5000;
};

std::vector<eval::SweepTarget> sweep_targets(SweepArgs& a, double omega) {
  std::vector<eval::SweepTarget> targets;
  for (const auto& p : a.inputs) targets.push_back({fs::path(p).stem().string(), dataio::load_csv(p), omega});
  if (targets.empty()) {
    targets.push_back(eval::synthetic_target("synthetic-h3", omega, 3, Rng::derive(a.c.seed, 99).next_u64()));
  }
  return targets;
}

void setup_sweeps(CLI::App& app, SweepArgs& hs, SweepArgs& ss, std::function<void()>& action, std::ostream& out) {
  auto* harm = app.add_subcommand("sweep-harmonics", "Zero-shot MSE per maximum harmonic count");
  add_seed_out(harm, hs.c);
  add_frequency(harm, hs.c);
  harm->add_option("--inputs", hs.inputs, "Target CSVs (default: a synthetic 3-harmonic target)")->delimiter(',');
  harm->add_option("--h-values", hs.h_values, "Harmonic counts")->delimiter(',');
  harm->add_option("--windows", hs.windows, "Training windows")->capture_default_str();
  harm->add_option("--plot", hs.c.plot, "Also write an SVG plot of the first target");
  harm->callback([&] {
    action = [&] {
      const double omega = resolve_omega(hs.c, 1.0 / 24.0);
      require(!hs.h_values.empty() && *std::min_element(hs.h_values.begin(), hs.h_values.end()) >= 1,
              "--h-values must be positive");
      require(hs.windows >= 1, "--windows must be >= 1");
      eval::SynthExperimentConfig cfg;
      cfg.count_train = hs.windows;
      const auto targets = sweep_targets(hs, omega);
      const auto rows = eval::harmonics_sweep(hs.h_values, targets, hs.c.seed, cfg);
      std::string csv = "h,dataset,mse\n";
      std::vector<double> xs, ys;
      for (const auto& r : rows) {
        csv += fmt::format("{},{},{}\n", r.h, r.dataset, fmt_double(r.mse));
        if (r.dataset == targets.front().id) {
          xs.push_back(r.h);
          ys.push_back(r.mse);
        }
      }
      emit(hs.c.out, csv, out);
      maybe_plot(hs.c.plot, xs, ys, "zero-shot MSE vs harmonics", true);
    };
  });

  auto* size = app.add_subcommand("sweep-size", "Zero-shot MSE over training size x channel count");
  add_seed_out(size, ss.c);
  add_frequency(size, ss.c);
  size->add_option("--inputs", ss.inputs, "Target CSV (default: a synthetic 3-harmonic target)")->delimiter(',');
  size->add_option("--sizes", ss.sizes, "Training window counts")->delimiter(',');
  size->add_option("--d-values", ss.d_values, "Channel counts")->delimiter(',');
  size->callback([&] {
    action = [&] {
      const double omega = resolve_omega(ss.c, 1.0 / 24.0);
      require(!ss.sizes.empty() && *std::min_element(ss.sizes.begin(), ss.sizes.end()) >= 1, "--sizes must be positive");
      require(!ss.d_values.empty() && *std::min_element(ss.d_values.begin(), ss.d_values.end()) >= 1,
              "--d-values must be positive");
      require(ss.inputs.size() <= 1, "sweep-size takes one target");
      const auto targets = sweep_targets(ss, omega);
      const auto grid = eval::size_variates_sweep(ss.sizes, ss.d_values, targets.front(), ss.c.seed);
      std::vector<std::string> rows, cols;
      for (auto s : ss.sizes) rows.push_back(fmt::format("size={}", s));
      for (auto d : ss.d_values) cols.push_back(fmt::format("d={}", d));
      emit(ss.c.out, dataio::format_matrix_csv(rows, cols, grid), out);
    };
  });
}

// ---- bench-gen ----

struct BenchArgs {
  Common c;
  int channels = 1000;
  Eigen::Index length = 1000;
  int repeats = 3;
};

std::uint64_t fnv1a(const double* data, std::size_t count) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void setup_bench(CLI::App& app, BenchArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sub = app.add_subcommand("bench-gen", "Time Freq-Synth generation (timing goes to stdout)");
  add_seed_out(sub, a.c);
  sub->add_option("--channels", a.channels, "Channel count")->capture_default_str();
  sub->add_option("--length", a.length, "Series length")->capture_default_str();
  sub->add_option("--repeats", a.repeats, "Timed repetitions (mean reported)")->capture_default_str();
  sub->callback([&] {
    action = [&] {
      require(a.channels >= 1 && a.length >= 2 && a.repeats >= 1, "--channels, --length and --repeats must be positive");
      generator::GeneratorConfig cfg;
      cfg.h = 3;
      cfg.d = a.channels;
      cfg.n = a.length;
      cfg.seed = a.c.seed;

      double total = 0.0;
      Dataset ds;
      for (int r = 0; r < a.repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        ds = generator::synthesize(cfg);
        total += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      const double seconds = total / a.repeats;
      const auto points = static_cast<double>(ds.values.size());
      out << fmt::format("generated {} points ({} channels x {} steps) in {:.6f} s ({:.4g} points/s)\n",
                         ds.values.size(), a.channels, a.length, seconds, points / seconds);
      if (!a.c.out.empty()) {
        json doc{{"channels", a.channels},
                 {"length", a.length},
                 {"points", ds.values.size()},
                 {"seed", a.c.seed},
                 {"digest", fmt::format("{:016x}", fnv1a(ds.values.data(), static_cast<std::size_t>(ds.values.size())))}};
        dataio::write_atomic(a.c.out, doc.dump(2) + "\n");
      }
    };
  });
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency-domain time-series toolkit: Freq-Synth generation, periodograms, evaluation", "freqsynth"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1, 1);

  std::function<void()> action;
  GenerateArgs gen;
  PeriodogramArgs per;
  EstimateArgs est;
  SimilarityArgs sim;
  FitArgs fit;
  EvaluateArgs evl;
  ConfusionArgs conf;
  GeneralizationArgs gener;
  TransferArgs trans;
  SweepArgs hsweep, ssweep;
  BenchArgs bench;
  setup_generate(app, gen, action, out);
  setup_periodogram(app, per, action, out);
  setup_estimate(app, est, action, out);
  setup_similarity(app, sim, action, out);
  setup_fit(app, fit, action, out);
  setup_evaluate(app, evl, action, out);
  setup_confusion(app, conf, action, out);
  setup_generalization(app, gener, action, out);
  setup_transfer(app, trans, action, out);
  setup_sweeps(app, hsweep, ssweep, action, out);
  setup_bench(app, bench, action, out);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (action) action();
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace freqsynth::cli

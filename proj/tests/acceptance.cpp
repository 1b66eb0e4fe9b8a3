// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "freqsynth/cli.hpp"
#include "freqsynth/dataio.hpp"
#include "freqsynth/eval.hpp"
#include "freqsynth/experiments.hpp"
#include "freqsynth/forecast.hpp"
#include "freqsynth/freqest.hpp"
#include "freqsynth/generator.hpp"
#include "freqsynth/random.hpp"
#include "freqsynth/spectral.hpp"

#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <unistd.h>

using namespace freqsynth;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s; // 0 = no runtime limit
  std::function<Outcome()> check;
};

constexpr double kPi = std::numbers::pi;

Outcome periodogram_exactness() {
  Rng rng(2024);
  double worst_peak = 0, worst_other = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<Eigen::Index>(3 + rng.below(2046));
    const auto j0 = static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>((n - 1) / 2)));
    const double amp = rng.uniform(0.1, 10.0);
    const double phase = rng.uniform(0.0, 2 * kPi);
    Vector x(n);
    for (Eigen::Index t = 1; t <= n; ++t) x[t - 1] = amp * std::cos(2 * kPi * t * j0 / double(n) + phase);
    const auto p = spectral::scaled_periodogram(x);
    worst_peak = std::max(worst_peak, std::abs(p.powers[j0 - 1] - amp * amp));
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      if (j != j0 - 1) worst_other = std::max(worst_other, p.powers[j]);
    }
  }
  return {worst_peak < 1e-6 && worst_other < 1e-9,
          fmt::format("max |P-A^2| = {:.2e}, max off-bin = {:.2e}", worst_peak, worst_other)};
}

Outcome parseval_agreement() {
  Rng rng(7);
  double worst_parseval = 0, worst_agree = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = trial == 0 ? 4096 : static_cast<Eigen::Index>(2 + rng.below(4095));
    Vector x(n);
    for (auto& v : x) v = rng.normal();
    const auto fast = spectral::dft(x);
    const auto naive = spectral::dft_naive(x);
    double energy = 0, diff = 0, scale = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      energy += std::norm(fast.coeffs[j]);
      diff = std::max(diff, std::abs(fast.coeffs[j] - naive.coeffs[j]));
      scale = std::max(scale, std::abs(naive.coeffs[j]));
    }
    worst_parseval = std::max(worst_parseval, std::abs(energy - x.squaredNorm()) / x.squaredNorm());
    worst_agree = std::max(worst_agree, diff / scale);
  }
  return {worst_parseval < 1e-9 && worst_agree < 1e-9,
          fmt::format("Parseval rel = {:.2e}, fast/naive rel = {:.2e}", worst_parseval, worst_agree)};
}

Outcome sampling_table() {
  const std::pair<const char*, int> pairs[] = {{"5m", 288}, {"10m", 144}, {"15m", 96}, {"30m", 48}, {"1h", 24}, {"1d", 7}};
  int ok = 0;
  for (const auto& [token, steps] : pairs) {
    if (freqest::freq_from_sampling_rate(SamplingRate::parse(token)).omega_bar == 1.0 / steps) ++ok;
  }
  return {ok == 6, fmt::format("{}/6 exact", ok)};
}

Outcome fundamental_recovery() {
  std::string detail;
  bool pass = true;
  for (const double omega : {1.0 / 7, 1.0 / 24, 1.0 / 48, 1.0 / 96}) {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      generator::GeneratorConfig cfg;
      cfg.omega_bar = omega;
      cfg.h = 3;
      cfg.seed = seed;
      const auto ds = generator::synthesize(cfg);
      const double bin = 1.0 / static_cast<double>(spectral::default_window(ds.length()));
      if (std::abs(freqest::estimate_fundamental(ds).omega_bar - omega) <= bin) ++hits;
    }
    pass = pass && hits >= 9;
    detail += fmt::format("1/{:.0f}: {}/10  ", 1.0 / omega, hits);
  }
  return {pass, detail};
}

Outcome generalization_gap() {
  int ok = 0;
  double min_ratio = 1e300;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = eval::generalization_experiment(1.0 / 24, seed);
    const double ratio = r.mse_without / r.mse_with;
    min_ratio = std::min(min_ratio, ratio);
    if (r.mse_with < r.mse_without && ratio >= 10.0) ++ok;
  }
  return {ok >= 9, fmt::format("{}/10 seeds with ratio >= 10 (min ratio {:.3g})", ok, min_ratio)};
}

Outcome confusion_trend() {
  int ok = 0;
  std::vector<double> counts(eval::kDefaultDistractorCounts.begin(), eval::kDefaultDistractorCounts.end());
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto curve = eval::confusion_experiment(1.0 / 24, eval::kDefaultDistractorCounts, seed);
    std::vector<double> mse;
    for (const auto& p : curve) mse.push_back(p.mse);
    if (eval::spearman(counts, mse) > 0) ++ok;
  }
  return {ok >= 8, fmt::format("{}/10 seeds with Spearman > 0", ok)};
}

double mean_abs_channel_pcc(const Dataset& ds) {
  double sum = 0;
  int pairs = 0;
  for (Eigen::Index a = 0; a < ds.channels(); ++a) {
    for (Eigen::Index b = a + 1; b < ds.channels(); ++b) {
      sum += std::abs(spectral::pearson(ds.channel(a).transpose(), ds.channel(b).transpose()));
      ++pairs;
    }
  }
  return sum / pairs;
}

Outcome correlation_control() {
  const std::vector<double> ls{1, 5, 20, 50};
  int up = 0;
  std::vector<double> mean_stat(ls.size(), 0.0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    generator::GeneratorConfig cfg;
    cfg.h = 3;
    cfg.d = 8;
    cfg.n = 4096;
    cfg.seed = 1000 + seed;
    const auto pool = generator::build_pool(cfg);
    std::vector<double> stat;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      cfg.l = static_cast<int>(ls[i]);
      stat.push_back(mean_abs_channel_pcc(generator::synthesize_from_pool(pool, cfg)));
      mean_stat[i] += stat.back() / 30;
    }
    if (eval::spearman(ls, stat) > 0) ++up;
  }
  const double p = eval::sign_test_p(up, 30);
  return {p < 0.01, fmt::format("{}/30 increasing, sign test p = {:.2e}; mean |PCC| {:.3f} {:.3f} {:.3f} {:.3f}", up, p,
                                mean_stat[0], mean_stat[1], mean_stat[2], mean_stat[3])};
}

Outcome transfer_ordering() {
  int ok = 0;
  std::string cells;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto registry = eval::synthetic_registry(seed);
    const auto s = eval::transfer_experiment(registry, seed);
    if (s.high_cells > 0 && s.low_cells > 0 && s.mean_scaled_high < s.mean_scaled_low) ++ok;
    if (seed == 0) cells = fmt::format("seed 0: high {:.3f} ({} cells) vs low {:.3f} ({} cells)", s.mean_scaled_high,
                                       s.high_cells, s.mean_scaled_low, s.low_cells);
  }
  return {ok >= 8, fmt::format("{}/10 seeds ordered; {}", ok, cells)};
}

Outcome generation_throughput() {
  generator::GeneratorConfig cfg;
  cfg.h = 3;
  cfg.d = 1000;
  cfg.n = 1000;
  cfg.seed = 1;
  const auto start = std::chrono::steady_clock::now();
  const auto ds = generator::synthesize(cfg);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {s <= 5.0 && ds.values.size() == 1'000'000,
          fmt::format("{} points in {:.3f} s ({:.3g} points/s{})", ds.values.size(), s, 1e6 / s,
                      s < 1.0 ? ", under the 1 s stretch target" : "")};
}

Outcome harmonics_direction() {
  int ok = 0;
  eval::SynthExperimentConfig cfg;
  cfg.count_train = 2000;
  const std::vector<int> hs{1, 3};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::vector<eval::SweepTarget> targets{
        eval::synthetic_target("h3", 1.0 / 24, 3, Rng::derive(seed, 99).next_u64())};
    const auto rows = eval::harmonics_sweep(hs, targets, seed, cfg);
    if (rows[1].mse <= rows[0].mse) ++ok;
  }
  return {ok >= 8, fmt::format("{}/10 seeds with mse(h=3) <= mse(h=1)", ok)};
}

Outcome amplitude_law() {
  std::string detail;
  bool pass = true;
  for (const double a : {1.0, 5.0}) {
    generator::GeneratorConfig cfg;
    cfg.m = 100'000;
    cfg.amplitude = a;
    cfg.seed = 3;
    double mean = 0;
    for (const auto& s : generator::build_pool(cfg)) mean += s.amplitude;
    mean /= cfg.m;
    const double rel = std::abs(mean - a) / a;
    pass = pass && rel < 0.05;
    detail += fmt::format("A'={}: mean {:.4f} ({:.2f}%)  ", a, mean, 100 * rel);
  }
  return {pass, detail};
}

Outcome seasonal_naive_zero() {
  Rng rng(12);
  double worst = 0;
  int cases = 0;
  for (Eigen::Index p = 1; p <= 96; ++p) {
    Vector cycle(p);
    for (auto& v : cycle) v = rng.normal();
    RowMatrix v(1, 96 + 720 + 40);
    for (Eigen::Index t = 0; t < v.cols(); ++t) v(0, t) = cycle[t % p];
    const auto reports = eval::evaluate_zero_shot(forecast::seasonal_naive_model(p), make_dataset(v), "periodic");
    for (const auto& r : reports) {
      worst = std::max(worst, r.mse);
      ++cases;
    }
  }
  return {worst <= 1e-12, fmt::format("{} period/horizon cases, max mse {:.2e}", cases, worst)};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / fmt::format("freqsynth-accept-{}", ::getpid())) {
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string at(const std::string& name) const { return (path / name).string(); }
};

Outcome cli_determinism() {
  TempDir dir;
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
  const auto a = dir.at("a.csv"), b = dir.at("b.csv");
  if (run({"generate", "--omega", "0.0416666666666666667", "--h", "3", "--n", "4000", "--d", "3", "--seed", "1", "--out", a}) ||
      run({"generate", "--rate", "1d", "--h", "3", "--n", "4000", "--d", "3", "--seed", "2", "--out", b})) {
    return {false, "setup failed: " + sink.str()};
  }
  const std::vector<std::vector<std::string>> commands{
      {"generate", "--rate", "1h", "--h", "3", "--seed", "7"},
      {"periodogram", "--input", a},
      {"estimate", "--input", a},
      {"similarity", "--inputs", a + "," + b},
      {"fit", "--omega", "0.0416666666666666667", "--horizon", "96", "--windows", "1000", "--n", "5000", "--seed", "3"},
      {"evaluate", "--model", "@fit", "--input", b, "--horizons", "96", "--fewshot", "0.1", "--seed", "3"},
      {"confusion", "--seed", "5"},
      {"generalization", "--seed", "5"},
      {"transfer", "--synthetic", "--seed", "5"},
      {"sweep-harmonics", "--h-values", "1,2,3", "--windows", "1000", "--seed", "5"},
      {"sweep-size", "--sizes", "200,500", "--d-values", "1,3", "--seed", "5"},
      {"bench-gen", "--channels", "100", "--length", "500", "--repeats", "1", "--seed", "5"},
  };
  int identical = 0;
  std::string failed;
  for (const auto& base : commands) {
    std::string first;
    bool same = true;
    for (int rep = 0; rep < 2; ++rep) {
      auto args = base;
      for (auto& arg : args) {
        if (arg == "@fit") arg = dir.at("fit-0.out");
      }
      const auto out = dir.at(fmt::format("{}-{}.out", base[0], rep));
      args.push_back("--out");
      args.push_back(out);
      if (run(args) != 0) {
        same = false;
        break;
      }
      const auto text = dataio::read_text(out);
      if (rep == 0) first = text;
      else same = same && text == first && !text.empty();
    }
    if (same) ++identical;
    else failed += " " + base[0];
  }
  const auto n = static_cast<int>(commands.size());
  return {identical == n, fmt::format("{}/{} subcommands byte-identical{}", identical, n,
                                      failed.empty() ? "" : "; differing:" + failed)};
}

Outcome fewshot_improvement() {
  int ok = 0;
  eval::SynthExperimentConfig cfg;
  cfg.count_train = 2000;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto target = eval::synthetic_target("w30", 1.0 / 30, 3, Rng::derive(seed, 77).next_u64());
    const auto r = eval::fewshot_experiment(1.0 / 24, target, seed, 0.1, forecast::kDefaultAnchor, cfg);
    if (r.mse_finetuned < r.mse_zero_shot) ++ok;
  }
  return {ok >= 9, fmt::format("{}/10 seeds improved", ok)};
}

} // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "periodogram exactness", 5, periodogram_exactness},
      {2, "Parseval and fast/naive DFT agreement", 10, parseval_agreement},
      {3, "sampling-rate table", 0, sampling_table},
      {4, "fundamental recovery", 60, fundamental_recovery},
      {5, "frequency-generalization gap", 60, generalization_gap},
      {6, "frequency-confusion trend", 120, confusion_trend},
      {7, "correlation control", 120, correlation_control},
      {8, "transfer ordering", 300, transfer_ordering},
      {9, "generation throughput", 0, generation_throughput},
      {10, "harmonics ablation direction", 0, harmonics_direction},
      {11, "exponential amplitude law", 0, amplitude_law},
      {12, "seasonal-naive zero error", 0, seasonal_naive_zero},
      {13, "CLI determinism", 0, cli_determinism},
      {14, "few-shot improvement", 0, fewshot_improvement},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && s > c.budget_s) {
      o.pass = false;
      o.detail += fmt::format("; over the {:.0f} s budget", c.budget_s);
    }
    if (!o.pass) ++failures;
    fmt::print("{} {:2d} {:<40} {:8.2f} s  {}\n", o.pass ? "PASS" : "FAIL", c.id, c.name, s, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}

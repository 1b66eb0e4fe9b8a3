#include "doctest.h"
#include "oracles.hpp"

#include "freqsynth/error.hpp"
#include "freqsynth/eval.hpp"
#include "freqsynth/forecast.hpp"
#include "freqsynth/generator.hpp"
#include "freqsynth/random.hpp"

#include <numbers>

using namespace freqsynth;
using namespace freqsynth::forecast;
using generator::WindowSet;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoError;
}

WindowSet random_windows(Rng& rng, Eigen::Index count, Eigen::Index L, Eigen::Index H) {
  WindowSet w;
  w.lookback_len = L;
  w.horizon_len = H;
  w.values.resize(count, L + H);
  for (auto& v : w.values.reshaped()) v = rng.normal();
  return w;
}

std::vector<std::vector<double>> rows_of(const WindowSet& w) {
  std::vector<std::vector<double>> out;
  for (Eigen::Index i = 0; i < w.size(); ++i) out.emplace_back(w.values.row(i).data(), w.values.row(i).data() + w.values.cols());
  return out;
}

double trace_scale(const oracle::Problem& p) {
  double tr = 0;
  for (std::size_t i = 0; i < p.features.rows; ++i) {
    for (std::size_t a = 0; a < p.features.cols; ++a) tr += p.features(i, a) * p.features(i, a);
  }
  return tr / static_cast<double>(p.features.cols);
}

WindowSet sine_windows(double freq, Eigen::Index length, Eigen::Index L, Eigen::Index H, double phase) {
  RowMatrix v(1, length);
  for (Eigen::Index t = 0; t < length; ++t) v(0, t) = std::sin(2 * std::numbers::pi * freq * t + phase);
  return generator::all_windows(make_dataset(v), L, H);
}

} // namespace

TEST_SUITE("forecast") {

TEST_CASE("naive baseline") {
  Vector lb(3);
  lb << 1.0, 4.0, 7.0;
  CHECK(naive_forecast(lb, 3) == Vector::Constant(3, 7.0));
  Vector two(2);
  two << 1.0, 2.0;
  CHECK(naive_forecast(two, 1) == Vector::Constant(1, 2.0));
  CHECK(code_of([] { naive_forecast(Vector(0), 3); }) == ErrorCode::InvalidWindow);

  const Dataset flat = make_dataset(RowMatrix::Constant(2, 300, 4.2));
  CHECK(eval::evaluate_horizon(naive_model(), flat, 96, 96).mse == 0.0);
}

TEST_CASE("seasonal naive baseline") {
  Vector lb(4);
  lb << 1, 2, 3, 4;
  Vector expect(4);
  expect << 3, 4, 3, 4;
  CHECK(seasonal_naive_forecast(lb, 4, 2) == expect);
  CHECK(seasonal_naive_forecast(lb, 6, 1) == naive_forecast(lb, 6));
  CHECK(code_of([&] { seasonal_naive_forecast(lb, 4, 5); }) == ErrorCode::PeriodTooLong);
  CHECK(code_of([&] { seasonal_naive_forecast(lb, 4, 0); }) == ErrorCode::InvalidPeriod);

  Vector sine(96 + 96);
  for (Eigen::Index t = 0; t < sine.size(); ++t) sine[t] = std::sin(2 * std::numbers::pi * t / 24.0);
  const Vector out = seasonal_naive_forecast(sine.head(96), 96, 24);
  CHECK((out - sine.tail(96)).squaredNorm() / 96 < 1e-12);
}

TEST_CASE("seasonal naive is exact on any periodic signal with p <= L") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = static_cast<Eigen::Index>(1 + rng.below(96));
    Vector cycle(p);
    for (auto& v : cycle) v = rng.normal();
    const Eigen::Index H = static_cast<Eigen::Index>(1 + rng.below(720));
    Vector x(96 + H);
    for (Eigen::Index t = 0; t < x.size(); ++t) x[t] = cycle[t % p];
    CHECK(seasonal_naive_forecast(x.head(96), H, p) == x.tail(H));
  }
}

TEST_CASE("instance statistics floor the scale") {
  const auto st = instance_stats(Vector::Constant(10, 3.0));
  CHECK(st.mean == 3.0);
  CHECK(st.scale == kStdFloor);
  Vector v(4);
  v << 1, 2, 3, 4;
  CHECK(instance_stats(v).scale == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("ridge matches the elimination oracle") {
  Rng rng(1);
  for (double lambda : {0.0, 1e-3, 0.5}) {
    const auto w = random_windows(rng, 120, 8, 4);
    const auto model = fit_ridge(w, lambda);
    const auto prob = oracle::normalize(rows_of(w), 8, 4);
    const auto ref = oracle::ridge(prob, lambda * trace_scale(prob));
    REQUIRE(model.weights.rows() == 4);
    REQUIRE(model.weights.cols() == 9);
    if (lambda > 0) {
      for (Eigen::Index o = 0; o < 4; ++o) {
        for (Eigen::Index a = 0; a < 9; ++a) {
          CHECK(model.weights(o, a) == doctest::Approx(ref(std::size_t(o), std::size_t(a))).epsilon(1e-8));
        }
      }
    } else {
      // Weights are not unique without a penalty; fitted values are.
      const auto reduced = oracle::drop_column(prob, 7);
      const auto want = oracle::fitted(reduced, oracle::ridge(reduced, 0.0));
      const Matrix got = build_design(w).features * model.weights.transpose();
      for (Eigen::Index i = 0; i < 120; ++i) {
        for (Eigen::Index o = 0; o < 4; ++o) {
          CHECK(got(i, o) == doctest::Approx(want(std::size_t(i), std::size_t(o))).epsilon(1e-8));
        }
      }
    }
  }
}

TEST_CASE("noiseless affine data is recovered at lambda = 0") {
  Rng rng(2);
  const Eigen::Index L = 12, H = 5, N = 80;
  Matrix truth(H, L + 1);
  for (auto& v : truth.reshaped()) v = rng.normal();

  WindowSet w;
  w.lookback_len = L;
  w.horizon_len = H;
  w.values.resize(N, L + H);
  for (Eigen::Index i = 0; i < N; ++i) {
    Vector lb(L);
    for (auto& v : lb) v = rng.normal() * 3 + 1;
    const auto st = instance_stats(lb);
    Vector z(L + 1);
    z.head(L) = (lb.array() - st.mean) / st.scale;
    z[L] = 1.0;
    w.values.row(i).head(L) = lb.transpose();
    w.values.row(i).tail(H) = ((truth * z).array() * st.scale + st.mean).transpose();
  }
  const auto model = fit_ridge(w, 0.0);
  const auto d = build_design(w);
  CHECK((d.features * model.weights.transpose() - d.targets).cwiseAbs().maxCoeff() < 1e-6);

  // Gradient of the least-squares objective vanishes at the solution.
  const Matrix grad = 2 * (d.features * model.weights.transpose() - d.targets).transpose() * d.features;
  CHECK(grad.norm() < 1e-6 * std::max(1.0, d.targets.norm()));

  // Predictions agree with a direct evaluation of the oracle weights.
  const auto prob = oracle::drop_column(oracle::normalize(rows_of(w), L, H), std::size_t(L - 1));
  const auto ref = oracle::ridge(prob, 0.0);
  for (Eigen::Index i = 0; i < 5; ++i) {
    const Vector lb = w.lookback(i).transpose();
    const Vector got = predict(model, lb);
    const auto st = instance_stats(lb);
    for (Eigen::Index o = 0; o < H; ++o) {
      double y = 0;
      for (Eigen::Index a = 0; a < L; ++a) y += ref(std::size_t(o), std::size_t(a)) * prob.features(std::size_t(i), std::size_t(a));
      CHECK(std::abs(got[o] - (y * st.scale + st.mean)) < 1e-9 * std::max(1.0, std::abs(got[o])));
    }
  }
}

TEST_CASE("normal equations agree with an iterative optimizer") {
  Rng rng(77);
  for (int trial = 0; trial < 3; ++trial) {
    const auto w = random_windows(rng, 50, 8, 4);
    const auto model = fit_ridge(w, 1e-3);
    const auto prob = oracle::normalize(rows_of(w), 8, 4);
    const double pen = 1e-3 * trace_scale(prob);
    const auto gd = oracle::gradient_descent(prob, pen, 4000);
    Matrix mw(4, 9);
    for (Eigen::Index o = 0; o < 4; ++o) {
      for (Eigen::Index a = 0; a < 9; ++a) mw(o, a) = gd(std::size_t(o), std::size_t(a));
    }
    const double f_closed = ridge_objective(build_design(w), model.weights, pen);
    const double f_iter = oracle::objective(prob, gd, pen);
    CHECK(f_closed <= f_iter + 1e-9);
    CHECK(std::abs(f_closed - f_iter) < 1e-4 * std::max(1.0, f_iter));
  }
}

TEST_CASE("huge lambda shrinks weights to zero") {
  Rng rng(3);
  const auto w = random_windows(rng, 200, 16, 8);
  const auto model = fit_ridge(w, 1e9);
  CHECK(model.weights.cwiseAbs().maxCoeff() < 1e-3);
  const Vector lb = w.lookback(0).transpose();
  const Vector out = predict(model, lb);
  CHECK((out.array() - lb.mean()).abs().maxCoeff() < 1e-2 * std::max(1.0, std::sqrt((lb.array() - lb.mean()).square().mean())));
}

TEST_CASE("zero weights forecast the lookback mean") {
  LinearForecaster m{Matrix::Zero(6, 11), 10, 6, 0.0};
  Vector lb = Vector::LinSpaced(10, -2.0, 7.0);
  CHECK((predict(m, lb).array() - lb.mean()).abs().maxCoeff() < 1e-12);
}

TEST_CASE("instance normalization makes prediction affine equivariant") {
  Rng rng(4);
  const auto w = random_windows(rng, 100, 10, 5);
  const auto model = fit_ridge(w, 1e-3);
  const Vector x = w.lookback(3).transpose();
  for (auto [a, b] : {std::pair{2.0, 3.0}, std::pair{0.01, -100.0}, std::pair{1e4, 1e3}}) {
    const Vector lhs = predict(model, (a * x.array() + b).matrix());
    const Vector rhs = (a * predict(model, x).array() + b).matrix();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
  }
  const Forecaster fs[] = {naive_model(), seasonal_naive_model(3), ridge_model(model)};
  RowMatrix rows(1, 10);
  rows.row(0) = x.transpose();
  for (const auto& f : fs) {
    const Matrix base = f.forecast(rows, 5);
    const Matrix scaled = f.forecast((rows.array() * 3.0 + 1.0).matrix(), 5);
    CHECK((scaled.array() - (base.array() * 3.0 + 1.0)).abs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("batched and single prediction agree, shorter horizons truncate") {
  Rng rng(5);
  const auto w = random_windows(rng, 60, 8, 6);
  const auto model = fit_ridge(w);
  const Matrix batch = predict_rows(model, w.values.leftCols(8));
  for (Eigen::Index i = 0; i < 5; ++i) {
    const Vector lb = w.lookback(i).transpose();
    CHECK((batch.row(i).transpose() - predict(model, lb)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((predict(model, lb, 3) - predict(model, lb).head(3)).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(code_of([&] { predict(model, Vector::Zero(7)); }) == ErrorCode::InvalidWindow);
  CHECK(code_of([&] { predict(model, Vector::Zero(8), 7); }) == ErrorCode::InvalidWindow);
}

TEST_CASE("fit on a pure sine generalizes in frequency") {
  const auto train = sine_windows(1.0 / 24, 2000, 96, 96, 0.3);
  const auto model = fit_ridge(train);
  const auto test = sine_windows(1.0 / 24, 600, 96, 96, 2.1);
  const Matrix pred = predict_rows(model, test.values.leftCols(96));
  CHECK(eval::metrics(pred, test.values.rightCols(96)).mse < 1e-3);
}

TEST_CASE("training errors") {
  WindowSet empty;
  empty.lookback_len = 4;
  empty.horizon_len = 2;
  empty.values.resize(0, 6);
  CHECK(code_of([&] { fit_ridge(empty); }) == ErrorCode::EmptyTrainingSet);
  LinearForecaster m{Matrix::Zero(2, 5), 4, 2, 0.0};
  CHECK(code_of([&] { finetune(m, empty); }) == ErrorCode::EmptyTrainingSet);
}

TEST_CASE("fine-tuning limits") {
  Rng rng(6);
  const auto base = random_windows(rng, 150, 10, 4);
  const auto other = random_windows(rng, 40, 10, 4);
  const auto pre = fit_ridge(base, 1e-3);

  const auto held = finetune(pre, other, 1e9);
  CHECK((held.weights - pre.weights).cwiseAbs().maxCoeff() < 1e-6);

  const auto refit = finetune(pre, base, 0.0);
  CHECK((refit.weights - pre.weights).cwiseAbs().maxCoeff() < 1e-9);

  const auto mid = finetune(pre, other, 1.0);
  const auto scratch = fit_ridge(other, 1e-3);
  const double d_pre = (mid.weights - pre.weights).norm();
  const double d_scratch = (mid.weights - scratch.weights).norm();
  CHECK(d_pre > 0.0);
  CHECK(d_scratch > 0.0);
  CHECK(d_pre < (scratch.weights - pre.weights).norm());
}

TEST_CASE("fine-tuning towards a shifted frequency lowers its error") {
  const auto source = sine_windows(1.0 / 24, 3000, 96, 96, 0.0);
  const auto pre = fit_ridge(source);
  const auto few = sine_windows(1.0 / 30, 400, 96, 96, 0.5);
  const auto tuned = finetune(pre, few, 1.0);
  const auto test = sine_windows(1.0 / 30, 800, 96, 96, 1.7);
  const auto err = [&](const LinearForecaster& m) {
    return eval::metrics(predict_rows(m, test.values.leftCols(96)), test.values.rightCols(96)).mse;
  };
  CHECK(err(tuned) < err(pre));
}

} // TEST_SUITE

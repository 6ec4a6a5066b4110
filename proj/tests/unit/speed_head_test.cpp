#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rffs/error.hpp"
#include "rffs/speed_head.hpp"

namespace rffs {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InternalError;
}

Matrix random_logits(std::mt19937_64& rng, std::size_t n, std::size_t k, double scale = 3.0) {
  std::normal_distribution<double> z(0.0, scale);
  Matrix m(n, k);
  for (double& v : m.data) v = z(rng);
  return m;
}

std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n, int k) {
  std::uniform_int_distribution<int> y(0, k - 1);
  std::vector<int> out(n);
  for (int& v : out) v = y(rng);
  return out;
}

TEST(BinSpeed, RoundsHalfUpAndClamps) {
  EXPECT_EQ(bin_speed(45.4), 44);
  EXPECT_EQ(bin_speed(45.5), 45);
  EXPECT_EQ(bin_speed(0.2), 0);
  EXPECT_EQ(bin_speed(120.0), 78);
  EXPECT_EQ(bin_speed(79.4), 78);
  EXPECT_EQ(code_of([] { bin_speed(0.0); }), ErrorCode::InvalidSpeed);
  EXPECT_EQ(code_of([] { bin_speed(-3.0); }), ErrorCode::InvalidSpeed);
  EXPECT_EQ(code_of([] { bin_speed(NAN); }), ErrorCode::InvalidSpeed);
}

TEST(BinCenter, RangeAndConsistency) {
  EXPECT_EQ(bin_center(0), 1.0);
  EXPECT_EQ(bin_center(78), 79.0);
  EXPECT_EQ(code_of([] { bin_center(79); }), ErrorCode::InvalidClass);
  EXPECT_EQ(code_of([] { bin_center(-1); }), ErrorCode::InvalidClass);
  for (int mph = 1; mph <= 79; ++mph) EXPECT_EQ(bin_center(bin_speed(mph)), mph);
  for (double s = 1.0; s <= 79.0; s += 0.037) EXPECT_LE(std::abs(bin_center(bin_speed(s)) - s), 0.5);
}

TEST(CrossEntropy, UniformLogitsGiveLogK) {
  const Matrix z(5, 79, 0.37);
  const std::vector<int> y{0, 5, 78, 40, 12};
  EXPECT_NEAR(cross_entropy(z, y), std::log(79.0), 1e-12);
  EXPECT_NEAR(std::log(79.0), 4.369448, 1e-6);
}

TEST(CrossEntropy, SaturatedTrueClass) {
  Matrix z(1, 79, 0.0);
  z(0, 17) = 1000.0;
  const std::vector<int> y{17};
  EXPECT_LT(cross_entropy(z, y), 1e-9);
  EXPECT_GE(cross_entropy(z, y), 0.0);
}

TEST(CrossEntropy, MatchesHighPrecisionReference) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    const Matrix z = random_logits(rng, 8, 79, 5.0);
    const auto y = random_labels(rng, 8, 79);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < 8; ++i) rows.emplace_back(z.row(i).begin(), z.row(i).end());
    EXPECT_NEAR(cross_entropy(z, y), oracle::precise_cross_entropy(rows, y), 1e-10);
  }
}

TEST(CrossEntropy, RejectsBadLabels) {
  const Matrix z(2, 79);
  const std::vector<int> bad{0, 79};
  EXPECT_EQ(code_of([&] { cross_entropy(z, bad); }), ErrorCode::InvalidClass);
  EXPECT_EQ(code_of([&] { cross_entropy_grad(z, bad); }), ErrorCode::InvalidClass);
  const std::vector<int> short_labels{0};
  EXPECT_EQ(code_of([&] { cross_entropy(z, short_labels); }), ErrorCode::ShapeMismatch);
}

TEST(CrossEntropyGrad, UniformClosedForm) {
  const std::size_t n = 4, k = 79;
  const Matrix z(n, k, -2.0);
  const std::vector<int> y{3, 0, 78, 3};
  const Matrix g = cross_entropy_grad(z, y);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double expected = static_cast<int>(j) == y[i] ? (1.0 / k - 1.0) / n : 1.0 / (n * k);
      EXPECT_NEAR(g(i, j), expected, 1e-15);
    }
  }
}

TEST(CrossEntropyGrad, RowsSumToZero) {
  std::mt19937_64 rng(42);
  const Matrix z = random_logits(rng, 8, 79, 10.0);
  const Matrix g = cross_entropy_grad(z, random_labels(rng, 8, 79));
  for (std::size_t i = 0; i < 8; ++i) {
    double sum = 0.0;
    for (double v : g.row(i)) sum += v;
    EXPECT_NEAR(sum, 0.0, 1e-12);
  }
}

TEST(CrossEntropyGrad, MatchesCentralDifferences) {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<std::size_t> nd(1, 8);
  const double h = 1e-6;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = nd(rng);
    Matrix z = random_logits(rng, n, 79);
    const auto y = random_labels(rng, n, 79);
    const Matrix g = cross_entropy_grad(z, y);
    for (std::size_t idx = 0; idx < z.data.size(); ++idx) {
      const double saved = z.data[idx];
      z.data[idx] = saved + h;
      const double up = cross_entropy(z, y);
      z.data[idx] = saved - h;
      const double down = cross_entropy(z, y);
      z.data[idx] = saved;
      const double fd = (up - down) / (2 * h);
      // Relative error with an absolute floor for near-zero entries.
      ASSERT_LE(std::abs(fd - g.data[idx]), 1e-5 * std::max(std::abs(g.data[idx]), 1e-3))
          << "batch " << t << " entry " << idx;
    }
  }
}

TEST(TrainLogistic, ZeroEpochsIsZeroModel) {
  const std::vector<std::vector<double>> x{{1.0, 2.0}, {3.0, 5.0}};
  const std::vector<int> y{3, 60};
  const TrainResult r = train_logistic(x, y, {0.1, 0, 1});
  for (double w : r.model.weights.data) EXPECT_EQ(w, 0.0);
  EXPECT_NEAR(r.final_loss, std::log(79.0), 1e-12);
  const Prediction p = predict(r.model, x[0]);
  EXPECT_EQ(p.class_index, 0);
  EXPECT_EQ(p.mph, 1.0);
}

TEST(TrainLogistic, SeparatesTwoPointToy) {
  const std::vector<std::vector<double>> x{{-1.0, 0.5}, {1.0, -0.5}};
  const std::vector<int> y{20, 60};
  const TrainResult r = train_logistic(x, y, {0.5, 200, 1});
  EXPECT_EQ(predict(r.model, x[0]).class_index, 20);
  EXPECT_EQ(predict(r.model, x[1]).class_index, 60);
}

TEST(TrainLogistic, MonotoneUnderSmallStep) {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> f(0.0, 1.0);
  std::vector<std::vector<double>> x(40, std::vector<double>(30));
  std::vector<int> y(40);
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = static_cast<int>(i % 3) * 20 + 10;
    for (std::size_t c = 0; c < 30; ++c) x[i][c] = f(rng) + 0.5 * y[i] * (c % 2 ? 1 : -1) / 10.0;
  }
  for (double lr : {1e-3, 1e-2}) {
    const TrainResult r = train_logistic(x, y, {lr, 300, 0});
    for (std::size_t e = 1; e < r.epoch_losses.size(); ++e) {
      ASSERT_LE(r.epoch_losses[e], r.epoch_losses[e - 1]) << "lr " << lr << " epoch " << e;
    }
    EXPECT_LT(r.final_loss, std::log(79.0));
  }
}

TEST(TrainLogistic, DeterministicWeights) {
  std::mt19937_64 rng(45);
  std::normal_distribution<double> f(0.0, 1.0);
  std::vector<std::vector<double>> x(25, std::vector<double>(30));
  for (auto& row : x)
    for (double& v : row) v = f(rng);
  const auto y = random_labels(rng, 25, 79);
  const TrainResult a = train_logistic(x, y, {0.05, 50, 9});
  const TrainResult b = train_logistic(x, y, {0.05, 50, 9});
  EXPECT_EQ(a.model.weights, b.model.weights);
  EXPECT_EQ(a.model.mean, b.model.mean);
}

TEST(TrainLogistic, RejectsNonFinite) {
  const std::vector<std::vector<double>> x{{1.0, NAN}};
  const std::vector<int> y{3};
  EXPECT_EQ(code_of([&] { train_logistic(x, y, {}); }), ErrorCode::NonFiniteFeature);
  EXPECT_EQ(code_of([&] { train_logistic({}, {}, {}); }), ErrorCode::EmptyDataset);
}

TEST(Predict, ShapeMismatch) {
  const TrainResult r = train_logistic({{1.0, 2.0}}, std::vector<int>{4}, {0.1, 1, 0});
  const std::vector<double> three{1, 2, 3};
  EXPECT_EQ(code_of([&] { predict(r.model, three); }), ErrorCode::ShapeMismatch);
}

TEST(Predict, MatchesManualMatrixMultiply) {
  std::mt19937_64 rng(46);
  std::normal_distribution<double> f(0.0, 1.0);
  std::vector<std::vector<double>> x(30, std::vector<double>(30));
  for (auto& row : x)
    for (double& v : row) v = 3.0 * f(rng) + 1.0;
  const TrainResult r = train_logistic(x, random_labels(rng, 30, 79), {0.1, 20, 0});
  const LogisticModel& m = r.model;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> in(30);
    for (double& v : in) v = 3.0 * f(rng);
    std::size_t best = 0;
    double best_z = -INFINITY;
    for (std::size_t k = 0; k < 79; ++k) {
      double z = m.weights(k, 30);
      for (std::size_t c = 0; c < 30; ++c) z += m.weights(k, c) * ((in[c] - m.mean[c]) / m.std[c]);
      if (z > best_z) {
        best_z = z;
        best = k;
      }
    }
    EXPECT_EQ(predict(m, in).class_index, static_cast<int>(best));
  }
}

TEST(Predict, ArgmaxInvariantUnderShift) {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 100; ++t) {
    const Matrix z = random_logits(rng, 1, 79);
    std::vector<double> row(z.data);
    const std::size_t before = argmax(row);
    for (double& v : row) v += 123.456;
    EXPECT_EQ(argmax(row), before);
  }
  const std::vector<double> tied{1.0, 3.0, 3.0, 2.0};
  EXPECT_EQ(argmax(tied), 1u);
}

TEST(Evaluate, InclusiveFiveMphThreshold) {
  const std::vector<double> p1{42}, t1{46};
  EXPECT_EQ(evaluate(p1, t1).within5_accuracy, 1.0);
  const std::vector<double> t2{47.5};
  EXPECT_EQ(evaluate(p1, t2).within5_accuracy, 0.0);
  const std::vector<double> t3{47.0};
  EXPECT_EQ(evaluate(p1, t3).within5_accuracy, 1.0);
  const std::vector<double> same{10, 20, 30, 79};
  EXPECT_EQ(evaluate(same, same).within5_accuracy, 1.0);
}

TEST(Evaluate, MatchesBruteCountOnRandomPairs) {
  std::mt19937_64 rng(48);
  std::uniform_real_distribution<double> s(1.0, 79.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> p(37), y(37);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = std::round(s(rng));
      y[i] = s(rng);
      hits += std::abs(p[i] - y[i]) <= 5.0;
    }
    const EvalReport r = evaluate(p, y);
    EXPECT_EQ(r.within5_accuracy, static_cast<double>(hits) / 37.0);
    EXPECT_GE(r.within5_accuracy, 0.0);
    EXPECT_LE(r.within5_accuracy, 1.0);
    std::size_t per_class_total = 0;
    for (const auto& c : r.per_class) per_class_total += c.count;
    EXPECT_EQ(per_class_total, 37u);
  }
}

TEST(Evaluate, ShapeErrors) {
  const std::vector<double> a{1, 2}, b{1};
  EXPECT_EQ(code_of([&] { evaluate(a, b); }), ErrorCode::ShapeMismatch);
  EXPECT_EQ(code_of([] { evaluate({}, {}); }), ErrorCode::EmptyDataset);
}

}  // namespace
}  // namespace rffs

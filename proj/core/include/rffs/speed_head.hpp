#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rffs {

/// Speed classes represent integer speeds 1..79 mph in 1 mph steps.
inline constexpr int kNumClasses = 79;
inline constexpr double kWithinThresholdMph = 5.0;

/// clamp(round_half_up(mph), 1, 79) - 1. Throws InvalidSpeed for mph <= 0 or
/// non-finite input.
int bin_speed(double speed_mph);

/// class + 1 mph. Throws InvalidClass outside [0, 78].
double bin_center(int class_index);

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Mean softmax cross-entropy in nats, log-sum-exp stabilized.
/// Throws InvalidClass for a label outside [0, cols) and ShapeMismatch when
/// the label count differs from the row count.
double cross_entropy(const Matrix& logits, std::span<const int> labels);

/// d(mean loss)/d(logits) = (softmax - onehot) / N.
Matrix cross_entropy_grad(const Matrix& logits, std::span<const int> labels);

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 2000;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kPooledFeatures = 30;

/// Multinomial logistic regression over standardized pooled features.
/// weights is K x (F + 1), row-major, the last column holding the bias.
struct LogisticModel {
  int k = kNumClasses;
  std::size_t f = kPooledFeatures;
  std::vector<double> mean;
  std::vector<double> std;
  Matrix weights;
  TrainConfig config;

  /// Logits for one raw (unstandardized) feature vector. Throws
  /// ShapeMismatch when the length differs from f.
  std::vector<double> logits(std::span<const double> features) const;
};

struct TrainResult {
  LogisticModel model;
  std::vector<double> epoch_losses;  // loss before each update, then final
  double final_loss = 0.0;
};

/// Full-batch gradient descent on the mean cross-entropy. Throws
/// NonFiniteFeature for NaN/Inf features, EmptyDataset when no rows are given
/// and ShapeMismatch on inconsistent widths.
TrainResult train_logistic(const std::vector<std::vector<double>>& features,
                           std::span<const int> labels, const TrainConfig& config,
                           int num_classes = kNumClasses);

struct Prediction {
  int class_index = 0;
  double mph = 0.0;
};

/// Argmax logit, ties to the smaller class.
Prediction predict(const LogisticModel& model, std::span<const double> features);

/// Index of the largest value, ties to the smallest index.
std::size_t argmax(std::span<const double> values);

struct ClassSummary {
  int class_index = 0;
  std::size_t count = 0;
  std::size_t within5 = 0;
  double mean_abs_error = 0.0;
  int most_predicted_class = 0;
};

struct EvalReport {
  std::size_t n = 0;
  double within5_accuracy = 0.0;
  double mean_abs_error = 0.0;
  std::optional<double> mean_cross_entropy;
  std::vector<ClassSummary> per_class;  // true classes present, ascending
};

/// within5 counts |pred - true| <= 5.0 inclusive. Throws ShapeMismatch on
/// mismatched lengths and EmptyDataset on empty input.
EvalReport evaluate(std::span<const double> pred_mph, std::span<const double> true_mph);

}  // namespace rffs

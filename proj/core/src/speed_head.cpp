#include "rffs/speed_head.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "rffs/error.hpp"

namespace rffs {

int bin_speed(double speed_mph) {
  if (!std::isfinite(speed_mph) || speed_mph <= 0.0) {
    std::ostringstream msg;
    msg << "speed " << speed_mph << " mph must be positive and finite";
    throw Error(ErrorCode::InvalidSpeed, msg.str());
  }
  const double rounded = std::floor(speed_mph + 0.5);
  return static_cast<int>(std::clamp(rounded, 1.0, static_cast<double>(kNumClasses))) - 1;
}

double bin_center(int class_index) {
  if (class_index < 0 || class_index >= kNumClasses) {
    throw Error(ErrorCode::InvalidClass, "class " + std::to_string(class_index) + " out of range");
  }
  return static_cast<double>(class_index + 1);
}

namespace {

void check_labels(const Matrix& logits, std::span<const int> labels) {
  if (labels.size() != logits.rows) {
    throw Error(ErrorCode::ShapeMismatch, "label count differs from logit rows");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= logits.cols) {
      throw Error(ErrorCode::InvalidClass, "label " + std::to_string(y) + " out of range");
    }
  }
}

// log(sum(exp(row))) with the max subtracted first.
double log_sum_exp(std::span<const double> row) {
  const double m = *std::max_element(row.begin(), row.end());
  double sum = 0.0;
  for (double z : row) sum += std::exp(z - m);
  return m + std::log(sum);
}

}  // namespace

double cross_entropy(const Matrix& logits, std::span<const int> labels) {
  check_labels(logits, labels);
  if (logits.rows == 0) throw Error(ErrorCode::EmptyDataset, "cross-entropy of an empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const auto row = logits.row(i);
    total += log_sum_exp(row) - row[static_cast<std::size_t>(labels[i])];
  }
  return total / static_cast<double>(logits.rows);
}

Matrix cross_entropy_grad(const Matrix& logits, std::span<const int> labels) {
  check_labels(logits, labels);
  if (logits.rows == 0) throw Error(ErrorCode::EmptyDataset, "gradient of an empty batch");
  Matrix grad(logits.rows, logits.cols);
  const double inv_n = 1.0 / static_cast<double>(logits.rows);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const auto row = logits.row(i);
    const double lse = log_sum_exp(row);
    for (std::size_t j = 0; j < logits.cols; ++j) grad(i, j) = std::exp(row[j] - lse) * inv_n;
    grad(i, static_cast<std::size_t>(labels[i])) -= inv_n;
  }
  return grad;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (values[j] > values[best]) best = j;
  }
  return best;
}

std::vector<double> LogisticModel::logits(std::span<const double> features) const {
  if (features.size() != f) {
    std::ostringstream msg;
    msg << "expected " << f << " features, got " << features.size();
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
  std::vector<double> x(f);
  for (std::size_t c = 0; c < f; ++c) x[c] = (features[c] - mean[c]) / std[c];

  std::vector<double> out(static_cast<std::size_t>(k));
  for (std::size_t r = 0; r < out.size(); ++r) {
    double z = weights(r, f);  // bias
    for (std::size_t c = 0; c < f; ++c) z += weights(r, c) * x[c];
    out[r] = z;
  }
  return out;
}

TrainResult train_logistic(const std::vector<std::vector<double>>& features,
                           std::span<const int> labels, const TrainConfig& config,
                           int num_classes) {
  if (features.empty()) throw Error(ErrorCode::EmptyDataset, "no training rows");
  if (labels.size() != features.size()) {
    throw Error(ErrorCode::ShapeMismatch, "label count differs from feature rows");
  }
  const std::size_t n = features.size();
  const std::size_t f = features.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].size() != f) throw Error(ErrorCode::ShapeMismatch, "ragged feature rows");
    for (double v : features[i]) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteFeature, "row " + std::to_string(i) + " has a non-finite feature");
      }
    }
  }

  LogisticModel model;
  model.k = num_classes;
  model.f = f;
  model.config = config;
  model.mean.assign(f, 0.0);
  model.std.assign(f, 1.0);
  for (std::size_t c = 0; c < f; ++c) {
    double mean = 0.0;
    for (const auto& row : features) mean += row[c];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& row : features) var += (row[c] - mean) * (row[c] - mean);
    var /= static_cast<double>(n);
    model.mean[c] = mean;
    // Constant features would divide by zero; leave them unscaled.
    model.std[c] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }

  // Design matrix with a trailing bias column.
  const std::size_t width = f + 1;
  Matrix x(n, width, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < f; ++c) x(i, c) = (features[i][c] - model.mean[c]) / model.std[c];
  }

  const auto classes = static_cast<std::size_t>(num_classes);
  model.weights = Matrix(classes, width);
  Matrix logits(n, classes);
  auto forward = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t r = 0; r < classes; ++r) {
        double z = 0.0;
        for (std::size_t c = 0; c < width; ++c) z += model.weights(r, c) * x(i, c);
        logits(i, r) = z;
      }
    }
  };

  TrainResult result;
  result.epoch_losses.reserve(config.epochs + 1);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    forward();
    result.epoch_losses.push_back(cross_entropy(logits, labels));
    const Matrix grad = cross_entropy_grad(logits, labels);
    for (std::size_t r = 0; r < classes; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i) g += grad(i, r) * x(i, c);
        model.weights(r, c) -= config.learning_rate * g;
      }
    }
  }
  forward();
  result.final_loss = cross_entropy(logits, labels);
  result.epoch_losses.push_back(result.final_loss);
  result.model = std::move(model);
  return result;
}

Prediction predict(const LogisticModel& model, std::span<const double> features) {
  const auto z = model.logits(features);
  const auto cls = static_cast<int>(argmax(z));
  return {cls, bin_center(cls)};
}

EvalReport evaluate(std::span<const double> pred_mph, std::span<const double> true_mph) {
  if (pred_mph.size() != true_mph.size()) {
    throw Error(ErrorCode::ShapeMismatch, "prediction and truth lengths differ");
  }
  if (pred_mph.empty()) throw Error(ErrorCode::EmptyDataset, "nothing to evaluate");

  struct Acc {
    std::size_t count = 0;
    std::size_t within = 0;
    double abs_err = 0.0;
    std::map<int, std::size_t> predicted;
  };
  std::map<int, Acc> by_class;

  EvalReport report;
  report.n = pred_mph.size();
  std::size_t within = 0;
  double abs_err_total = 0.0;
  for (std::size_t i = 0; i < report.n; ++i) {
    const double err = std::abs(pred_mph[i] - true_mph[i]);
    const bool ok = err <= kWithinThresholdMph;
    within += ok ? 1 : 0;
    abs_err_total += err;

    Acc& acc = by_class[bin_speed(true_mph[i])];
    ++acc.count;
    acc.within += ok ? 1 : 0;
    acc.abs_err += err;
    ++acc.predicted[pred_mph[i] > 0.0 ? bin_speed(pred_mph[i]) : 0];
  }
  report.within5_accuracy = static_cast<double>(within) / static_cast<double>(report.n);
  report.mean_abs_error = abs_err_total / static_cast<double>(report.n);

  for (const auto& [cls, acc] : by_class) {
    ClassSummary s;
    s.class_index = cls;
    s.count = acc.count;
    s.within5 = acc.within;
    s.mean_abs_error = acc.abs_err / static_cast<double>(acc.count);
    std::size_t best = 0;
    for (const auto& [p, count] : acc.predicted) {
      if (count > best) {
        best = count;
        s.most_predicted_class = p;
      }
    }
    report.per_class.push_back(s);
  }
  return report;
}

}  // namespace rffs

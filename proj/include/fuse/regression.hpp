#pragma once

// Linear models over FeatureVector: ordinary least squares and ridge.

#include <array>
#include <cmath>
#include <string>
#include <vector>

// <resolv.h> (reached through httplib) defines _res, an Eigen parameter name.
#pragma push_macro("_res")
#undef _res
#include <Eigen/Dense>
#pragma pop_macro("_res")

#include "fuse/errors.hpp"
#include "fuse/features.hpp"

namespace fuse {

enum class Target { kSemantic, kFluency };

inline const char* to_string(Target t) { return t == Target::kSemantic ? "semantic" : "fluency"; }

inline Target parse_target(const std::string& s) {
  if (s == "semantic") return Target::kSemantic;
  if (s == "fluency") return Target::kFluency;
  throw DataError("unknown regression target: " + s);
}

struct LinearModel {
  std::array<double, kNumFeatures> weights{};
  double intercept = 0.0;
  Target target = Target::kSemantic;

  double predict(const FeatureVector& x) const {
    double y = intercept;
    for (size_t i = 0; i < kNumFeatures; ++i) y += weights[i] * x[i];
    return y;
  }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

namespace detail {

inline void check_training_shape(const std::vector<FeatureVector>& X, const std::vector<double>& y, size_t min_rows,
                                 const char* what) {
  if (X.size() != y.size()) {
    throw DataError(std::string(what) + ": " + std::to_string(X.size()) + " feature rows but " +
                    std::to_string(y.size()) + " targets");
  }
  if (X.size() < min_rows) {
    throw NumericError(std::string(what) + " needs at least " + std::to_string(min_rows) + " rows, got " +
                       std::to_string(X.size()));
  }
  for (size_t r = 0; r < X.size(); ++r) {
    for (size_t i = 0; i < kNumFeatures; ++i) {
      if (!std::isfinite(X[r][i])) throw NumericError(std::string(what) + ": non-finite feature in row " + std::to_string(r));
    }
    if (!std::isfinite(y[r])) throw NumericError(std::string(what) + ": non-finite target in row " + std::to_string(r));
  }
}

inline LinearModel to_model(const Eigen::VectorXd& w, double b, Target target, const char* what) {
  LinearModel m;
  m.target = target;
  m.intercept = b;
  for (size_t i = 0; i < kNumFeatures; ++i) m.weights[i] = w(static_cast<Eigen::Index>(i));
  if (!std::isfinite(b) || !w.allFinite()) throw NumericError(std::string(what) + ": non-finite coefficients");
  return m;
}

}  // namespace detail

// Least squares with an intercept. Needs n >= 5 and a full-rank design.
inline LinearModel ols_fit(const std::vector<FeatureVector>& X, const std::vector<double>& y,
                           Target target = Target::kSemantic) {
  detail::check_training_shape(X, y, kNumFeatures + 1, "ols_fit");
  const auto n = static_cast<Eigen::Index>(X.size());
  constexpr auto k = static_cast<Eigen::Index>(kNumFeatures);
  Eigen::MatrixXd A(n, k + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index i = 0; i < k; ++i) A(r, i) = X[static_cast<size_t>(r)][static_cast<size_t>(i)];
    A(r, k) = 1.0;
    b(r) = y[static_cast<size_t>(r)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < k + 1) {
    throw NumericError("ols_fit: design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                       std::to_string(k + 1) + "); use ridge regression instead");
  }
  const Eigen::VectorXd coef = qr.solve(b);
  return detail::to_model(coef.head(k), coef(k), target, "ols_fit");
}

// Minimizes |y - Xw - b|^2 + lambda |w|^2 with the intercept unpenalized. Solved
// on centered data as the stacked least-squares problem [Xc; sqrt(lambda) I].
inline LinearModel ridge_fit(const std::vector<FeatureVector>& X, const std::vector<double>& y, double lambda = 1.0,
                             Target target = Target::kSemantic) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw UsageError("ridge_fit: lambda must be a non-negative number");
  detail::check_training_shape(X, y, 2, "ridge_fit");
  const auto n = static_cast<Eigen::Index>(X.size());
  constexpr auto k = static_cast<Eigen::Index>(kNumFeatures);

  Eigen::VectorXd x_mean = Eigen::VectorXd::Zero(k);
  double y_mean = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index i = 0; i < k; ++i) x_mean(i) += X[static_cast<size_t>(r)][static_cast<size_t>(i)];
    y_mean += y[static_cast<size_t>(r)];
  }
  x_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + k, k);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + k);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index i = 0; i < k; ++i) A(r, i) = X[static_cast<size_t>(r)][static_cast<size_t>(i)] - x_mean(i);
    b(r) = y[static_cast<size_t>(r)] - y_mean;
  }
  const double root = std::sqrt(lambda);
  for (Eigen::Index i = 0; i < k; ++i) A(n + i, i) = root;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  if (qr.rank() < k) {
    throw NumericError("ridge_fit: singular system (constant feature column with lambda = 0)");
  }
  const Eigen::VectorXd w = qr.solve(b);
  return detail::to_model(w, y_mean - x_mean.dot(w), target, "ridge_fit");
}

}  // namespace fuse

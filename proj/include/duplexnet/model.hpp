#pragma once

#include "duplexnet/multiplex.hpp"
#include "duplexnet/types.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace duplexnet {

enum class ModelVariant { Restricted, Full };

/// Which regressors enter the logistic link model. The restricted model uses
/// the target layer's own persistence and closure; the full model adds the
/// other layer and the multiplex terms.
struct ModelSpec {
  ModelVariant variant = ModelVariant::Full;
  Layer target = Layer::Financial;
  int lag_h = 1;

  std::vector<std::string> regressors() const;
  Index size() const { return variant == ModelVariant::Restricted ? 3 : 7; }
};

// Column order of TrainingSet::features.
enum FeatureColumn : Index { kEFin = 0, kESoc, kEAny, kTFin, kTSoc, kTMulti, kFeatureColumns };

struct WindowRange {
  int first = 0;  // inclusive
  int last = 0;   // inclusive
};

/// Stacked (features at t', target-layer edge at t' + h) rows over a span of
/// source windows, pairs in lexicographic order within each window.
struct TrainingSet {
  Eigen::MatrixXd features;  // rows x kFeatureColumns
  Eigen::VectorXd labels;    // 0 or 1
  std::vector<int> source_windows;
  Layer target = Layer::Financial;
  int lag_h = 1;
  std::uint64_t fingerprint = 0;

  Index rows() const { return labels.size(); }
};

TrainingSet build_training_set(const DuplexTimeline& timeline, Layer target, int lag_h,
                               WindowRange span);

/// Assembles a TrainingSet from explicit rows.
TrainingSet make_training_set(Eigen::MatrixXd features, Eigen::VectorXd labels,
                              Layer target = Layer::Financial, int lag_h = 1);

Eigen::RowVectorXd feature_row(const PairFeatures& f);
Eigen::MatrixXd design_matrix(const ModelSpec& spec, const Eigen::MatrixXd& features);

double loglik(const ModelSpec& spec, const Eigen::VectorXd& coefficients, const TrainingSet& data);
Eigen::VectorXd loglik_gradient(const ModelSpec& spec, const Eigen::VectorXd& coefficients,
                                const TrainingSet& data);

struct FitOptions {
  double tolerance = 1e-8;  // on the gradient max-norm
  int max_iterations = 100;
  double separation_bound = 30.0;
  double ridge_penalty = 1e-6;
};

struct FitResult {
  ModelSpec spec;
  Eigen::VectorXd coefficients;
  double loglik = 0.0;  // unpenalized, at `coefficients`
  int iterations = 0;
  double gradient_norm = 0.0;  // of the objective actually optimized
  bool converged = false;
  bool ridge_fallback = false;
  std::uint64_t data_fingerprint = 0;
};

/// Newton-Raphson with step halving. Falls back to a small L2 penalty on the
/// non-intercept coefficients when the data look separable or the Hessian is
/// singular.
FitResult fit(const ModelSpec& spec, const TrainingSet& data, const FitOptions& options = {});

/// sqrt(diag(H^-1)) of the negative log-likelihood Hessian at the fit.
Eigen::VectorXd standard_errors(const FitResult& fit, const TrainingSet& data);

double predict(const FitResult& fit, const PairFeatures& features);
Eigen::VectorXd predict(const FitResult& fit, const Eigen::MatrixXd& features);

// Upper 0.1% point of chi-square with 4 degrees of freedom.
inline constexpr double kLambdaThreshold = 18.47;

struct LikelihoodRatio {
  double lambda = 0.0;
  bool significant = false;
};

LikelihoodRatio likelihood_ratio(const FitResult& full, const FitResult& restricted);

double logistic(double eta);

}  // namespace duplexnet

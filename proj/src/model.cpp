#include "duplexnet/model.hpp"

#include "duplexnet/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <array>
#include <cstring>

namespace duplexnet {

namespace {

// Neumaier compensated sum, fixed left-to-right order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double bernoulli_loglik(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  // y*eta - softplus(eta), with softplus(x) = max(x, 0) + log1p(exp(-|x|)).
  const Eigen::ArrayXd a = eta.array();
  const Eigen::ArrayXd terms = (y.array() > 0.5).select(a.min(0.0), -a.max(0.0)) - (-a.abs()).exp().log1p();
  CompensatedSum total;
  for (Index r = 0; r < terms.size(); ++r) total.add(terms(r));
  return total.value();
}

Eigen::VectorXd probabilities(const Eigen::VectorXd& eta) {
  return eta.unaryExpr([](double x) { return logistic(x); });
}

std::array<Index, 7> column_map(const ModelSpec& spec) {
  // Indices into the feature columns; -1 is the intercept.
  const bool fin = spec.target != Layer::Social;
  const Index t_own = fin ? kTFin : kTSoc, e_own = fin ? kEFin : kESoc;
  const Index t_other = fin ? kTSoc : kTFin, e_other = fin ? kESoc : kEFin;
  return {-1, t_own, e_own, t_other, e_other, kTMulti, kEAny};
}

void check_coefficients(const ModelSpec& spec, const Eigen::VectorXd& beta) {
  if (beta.size() != spec.size())
    throw Error(Errc::ShapeError, "expected " + std::to_string(spec.size()) + " coefficients, got " +
                                      std::to_string(beta.size()));
  if (!beta.allFinite()) throw Error(Errc::NumericError, "non-finite coefficient");
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fingerprint_of(const TrainingSet& d) {
  std::uint64_t h = 14695981039346656037ull;
  const int target = static_cast<int>(d.target);
  h = fnv1a(h, &target, sizeof target);
  h = fnv1a(h, &d.lag_h, sizeof d.lag_h);
  h = fnv1a(h, d.source_windows.data(), d.source_windows.size() * sizeof(int));
  h = fnv1a(h, d.labels.data(), std::size_t(d.labels.size()) * sizeof(double));
  h = fnv1a(h, d.features.data(), std::size_t(d.features.size()) * sizeof(double));
  return h;
}

}  // namespace

double logistic(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

std::vector<std::string> ModelSpec::regressors() const {
  const bool fin = target != Layer::Social;
  std::vector<std::string> names{"intercept", fin ? "t_fin" : "t_soc", fin ? "e_fin" : "e_soc"};
  if (variant == ModelVariant::Full) {
    names.push_back(fin ? "t_soc" : "t_fin");
    names.push_back(fin ? "e_soc" : "e_fin");
    names.push_back("t_multi");
    names.push_back("e_any");
  }
  return names;
}

Eigen::RowVectorXd feature_row(const PairFeatures& f) {
  Eigen::RowVectorXd row(kFeatureColumns);
  row(kEFin) = f.e_fin;
  row(kESoc) = f.e_soc;
  row(kEAny) = f.e_any;
  row(kTFin) = f.t_fin;
  row(kTSoc) = f.t_soc;
  row(kTMulti) = f.t_multi;
  return row;
}

Eigen::MatrixXd design_matrix(const ModelSpec& spec, const Eigen::MatrixXd& features) {
  if (features.cols() != kFeatureColumns)
    throw Error(Errc::ShapeError, "feature matrix must have " + std::to_string(kFeatureColumns) + " columns");
  const auto map = column_map(spec);
  Eigen::MatrixXd x(features.rows(), spec.size());
  for (Index c = 0; c < spec.size(); ++c) {
    if (map[std::size_t(c)] < 0)
      x.col(c).setOnes();
    else
      x.col(c) = features.col(map[std::size_t(c)]);
  }
  return x;
}

TrainingSet make_training_set(Eigen::MatrixXd features, Eigen::VectorXd labels, Layer target, int lag_h) {
  if (features.rows() != labels.size() || features.cols() != kFeatureColumns)
    throw Error(Errc::ShapeError, "training features and labels disagree in shape");
  TrainingSet d;
  d.features = std::move(features);
  d.labels = std::move(labels);
  d.target = target;
  d.lag_h = lag_h;
  d.fingerprint = fingerprint_of(d);
  return d;
}

TrainingSet build_training_set(const DuplexTimeline& timeline, Layer target, int lag_h, WindowRange span) {
  if (lag_h < 1) throw Error(Errc::Usage, "lag must be positive");
  if (span.first < 0 || span.last < span.first)
    throw Error(Errc::InsufficientHistory, "empty or negative training span");
  if (span.last + lag_h >= timeline.size())
    throw Error(Errc::InsufficientHistory, "no snapshot at window " + std::to_string(span.last + lag_h));

  const Index pairs = pair_count(timeline.n());
  const Index windows = span.last - span.first + 1;
  TrainingSet d;
  d.target = target;
  d.lag_h = lag_h;
  d.features.resize(pairs * windows, kFeatureColumns);
  d.labels.resize(pairs * windows);
  Index r = 0;
  for (int t = span.first; t <= span.last; ++t) {
    d.source_windows.push_back(t);
    const auto& future = timeline.snapshots[std::size_t(t + lag_h)].layer(target);
    const auto& rows = timeline.features[std::size_t(t)];
    // Labels by walking the sorted edge list alongside the lexicographic pairs.
    auto edge = future.edges.begin();
    for (const auto& f : rows) {
      while (edge != future.edges.end() && *edge < Pair{f.u, f.v}) ++edge;
      d.labels(r) = (edge != future.edges.end() && *edge == Pair{f.u, f.v}) ? 1.0 : 0.0;
      d.features(r, kEFin) = f.e_fin;
      d.features(r, kESoc) = f.e_soc;
      d.features(r, kEAny) = f.e_any;
      d.features(r, kTFin) = f.t_fin;
      d.features(r, kTSoc) = f.t_soc;
      d.features(r, kTMulti) = f.t_multi;
      ++r;
    }
  }
  d.fingerprint = fingerprint_of(d);
  return d;
}

double loglik(const ModelSpec& spec, const Eigen::VectorXd& coefficients, const TrainingSet& data) {
  check_coefficients(spec, coefficients);
  return bernoulli_loglik(design_matrix(spec, data.features) * coefficients, data.labels);
}

Eigen::VectorXd loglik_gradient(const ModelSpec& spec, const Eigen::VectorXd& coefficients,
                                const TrainingSet& data) {
  check_coefficients(spec, coefficients);
  const Eigen::MatrixXd x = design_matrix(spec, data.features);
  return x.transpose() * (data.labels - probabilities(x * coefficients));
}

FitResult fit(const ModelSpec& spec, const TrainingSet& data, const FitOptions& options) {
  if (data.rows() == 0) throw Error(Errc::ShapeError, "empty training set");
  const double positives = data.labels.sum();
  if (positives == 0.0 || positives == static_cast<double>(data.rows()))
    throw Error(Errc::DegenerateLabels, "all training labels are identical");

  const Eigen::MatrixXd x = design_matrix(spec, data.features);
  const Index p = spec.size();
  // Penalty applies to every coefficient except the intercept.
  Eigen::VectorXd penalty_mask = Eigen::VectorXd::Ones(p);
  penalty_mask(0) = 0.0;

  FitResult result;
  result.spec = spec;
  result.data_fingerprint = data.fingerprint;

  for (bool ridge : {false, true}) {
    const double penalty = ridge ? options.ridge_penalty : 0.0;
    auto objective = [&](const Eigen::VectorXd& beta, const Eigen::VectorXd& eta) {
      return bernoulli_loglik(eta, data.labels) -
             0.5 * penalty * beta.cwiseProduct(penalty_mask).squaredNorm();
    };

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(data.rows());
    double obj = objective(beta, eta);
    bool restart = false;
    result.ridge_fallback = ridge;
    result.converged = false;
    result.iterations = 0;

    for (int iter = 0;; ++iter) {
      const Eigen::VectorXd mu = probabilities(eta);
      const Eigen::VectorXd grad =
          x.transpose() * (data.labels - mu) - penalty * beta.cwiseProduct(penalty_mask);
      result.gradient_norm = grad.cwiseAbs().maxCoeff();
      result.iterations = iter;
      if (result.gradient_norm <= options.tolerance) {
        result.converged = true;
        break;
      }
      if (iter >= options.max_iterations) break;

      const Eigen::VectorXd w = mu.cwiseProduct(Eigen::VectorXd::Ones(mu.size()) - mu);
      const Eigen::MatrixXd wx = x.array().colwise() * w.array();
      Eigen::MatrixXd hessian = x.transpose() * wx;
      hessian.diagonal() += penalty * penalty_mask;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-13) {
        restart = !ridge;
        break;
      }
      const Eigen::VectorXd delta = ldlt.solve(grad);

      double step = 1.0;
      bool accepted = false;
      Eigen::VectorXd candidate, cand_eta;
      const double slack = 1e-13 * (1.0 + std::abs(obj));
      for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
        candidate = beta + step * delta;
        cand_eta = x * candidate;
        const double cand_obj = objective(candidate, cand_eta);
        if (std::isfinite(cand_obj) && cand_obj >= obj - slack) {
          obj = cand_obj;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      beta = std::move(candidate);
      eta = std::move(cand_eta);
      if (!ridge && beta.cwiseAbs().maxCoeff() > options.separation_bound) {
        restart = true;
        break;
      }
    }
    result.coefficients = beta;
    result.loglik = bernoulli_loglik(eta, data.labels);
    if (!restart) break;
  }
  return result;
}

Eigen::VectorXd standard_errors(const FitResult& fit, const TrainingSet& data) {
  const Eigen::MatrixXd x = design_matrix(fit.spec, data.features);
  const Eigen::VectorXd mu = probabilities(x * fit.coefficients);
  const Eigen::VectorXd w = mu.cwiseProduct(Eigen::VectorXd::Ones(mu.size()) - mu);
  const Eigen::MatrixXd hessian = x.transpose() * w.asDiagonal() * x;
  const Eigen::MatrixXd cov = hessian.ldlt().solve(Eigen::MatrixXd::Identity(hessian.rows(), hessian.cols()));
  return cov.diagonal().cwiseSqrt();
}

double predict(const FitResult& fit, const PairFeatures& features) {
  const Eigen::MatrixXd x = design_matrix(fit.spec, feature_row(features));
  return logistic(x.row(0).dot(fit.coefficients));
}

Eigen::VectorXd predict(const FitResult& fit, const Eigen::MatrixXd& features) {
  return probabilities(design_matrix(fit.spec, features) * fit.coefficients);
}

LikelihoodRatio likelihood_ratio(const FitResult& full, const FitResult& restricted) {
  if (full.spec.variant != ModelVariant::Full || restricted.spec.variant != ModelVariant::Restricted ||
      full.spec.target != restricted.spec.target || full.spec.lag_h != restricted.spec.lag_h ||
      full.data_fingerprint != restricted.data_fingerprint)
    throw Error(Errc::IncomparableFits, "likelihood ratio needs a full and a restricted fit on the same data");
  LikelihoodRatio lr;
  // Nested maximization cannot lose likelihood; a negative gap is rounding.
  lr.lambda = std::max(0.0, 2.0 * (full.loglik - restricted.loglik));
  lr.significant = lr.lambda > kLambdaThreshold;
  return lr;
}

}  // namespace duplexnet

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lobimpact/impact.hpp"
#include "lobimpact/types.hpp"

namespace lobimpact {

// Least-squares line/hyperplane solved through the normal equations,
// beta = (X'X)^-1 X'y with an intercept column prepended.
struct LinearModel {
  std::vector<double> beta;          // beta[0] = intercept, then one per feature
  std::vector<double> xtx_inv_diag;  // v_j, for coefficient standard errors
  double rss = 0.0;
  std::size_t n = 0;
  std::size_t p = 0;  // feature count, excluding the intercept

  double intercept() const { return beta[0]; }
  double slope() const { return beta[1]; }

  // Unbiased residual variance RSS / (n - p - 1).
  double sigma2() const;

  double predict1(double x) const { return beta[0] + beta[1] * x; }
  double predict(std::span<const double> features) const;
};

// Throws SingularMatrixError unless X'X is positive-definite
// (needs n > p + 1 and full column rank).
LinearModel ols_fit(std::span<const double> x, std::span<const double> y);
LinearModel ols_fit(const std::vector<std::vector<double>>& rows, std::span<const double> y);

// t_j = beta_j / (sigma * sqrt(v_j)); +/-inf on a zero-residual fit, 0 when
// the coefficient itself is exactly 0.
std::vector<double> t_statistics(const LinearModel& model);

struct Evaluation {
  double mse = 0.0;
  std::optional<double> r2;           // empty when TSS == 0
  std::optional<double> adjusted_r2;  // empty when undefined (TSS == 0 or n <= p+1)
  double aic = 0.0;
  double bic = 0.0;
};

// Gaussian-likelihood AIC/BIC with sigma^2 = RSS/n and k = p + 2 parameters
// (coefficients plus the variance).
Evaluation evaluate_predictions(std::span<const double> y_pred, std::span<const double> y,
                                std::size_t p);
Evaluation evaluate(const LinearModel& model, std::span<const double> x,
                    std::span<const double> y);

// CART regression stump stack: greedy binary splits on one feature,
// maximizing variance reduction; candidate thresholds are midpoints of
// consecutive distinct sorted x; equal-gain ties go to the lowest threshold.
struct RegressionTree {
  struct Node {
    // Leaf when left < 0.
    double threshold = 0.0;  // x < threshold goes left
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf mean
    std::size_t count = 0;
  };
  std::vector<Node> nodes;  // nodes[0] is the root
  int max_depth = 0;
  int min_samples_leaf = 1;

  double predict(double x) const;
  std::size_t leaf_count() const;
};

RegressionTree tree_fit(std::span<const double> x, std::span<const double> y, int max_depth,
                        int min_samples_leaf);
double tree_predict(const RegressionTree& tree, double x);

enum class ModelKind { Ols, Tree };
ModelKind model_kind_from_string(const std::string& name);

struct TreeParams {
  int max_depth = 8;
  int min_samples_leaf = 5;
};

// Seeded shuffle, then folds of size floor(n/k) or ceil(n/k): disjoint,
// exhaustive, and identical for identical seeds.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int k, std::uint64_t seed);

struct CvScores {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<double> fold_mse;
  std::vector<double> fold_r2;  // NaN for folds with constant held-out y
  double mse_mean = 0.0;
  double mse_stddev = 0.0;
  double r2_mean = 0.0;
  double r2_stddev = 0.0;
};

CvScores kfold_cv(std::span<const double> x, std::span<const double> y, int k, ModelKind kind,
                  std::uint64_t seed, const TreeParams& tree_params = {});

// Slope of the linear region of the aggregate impact curve. The region is
// |delta_v| <= the q-th quantile of |delta_v| unless an absolute share
// cutoff overrides it.
struct KyleRegion {
  double quantile = 0.5;
  std::optional<double> abs_cutoff;  // shares
};

struct KyleLambda {
  double lambda = 0.0;  // cents per share
  LinearModel model;
  double region_lo = 0.0;
  double region_hi = 0.0;
  std::size_t n_in_region = 0;
};

// Throws std::invalid_argument when fewer than 30 samples fall inside the
// region (the message names its bounds).
KyleLambda kyle_lambda(std::span<const ImbalanceSample> samples, const KyleRegion& region = {});

// log G = delta * log(Q/V) + log(prefactor), fitted by OLS. All inputs must
// be strictly positive.
struct PowerLaw {
  double exponent = 0.0;
  double prefactor = 1.0;
  LinearModel model;
};

PowerLaw power_law_fit(std::span<const double> volume_fraction, std::span<const double> impact);

}  // namespace lobimpact

#include "lobimpact/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lobimpact/rng.hpp"

namespace lobimpact {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Dense symmetric solve via Cholesky; the factorization failing is exactly
// the "X'X not positive-definite" condition the fit must reject.
class Cholesky {
 public:
  // a is row-major d x d, symmetric.
  Cholesky(std::vector<double> a, std::size_t d) : l_(std::move(a)), d_(d) {
    for (std::size_t j = 0; j < d_; ++j) {
      double diag = at(j, j);
      for (std::size_t k = 0; k < j; ++k) diag -= at(j, k) * at(j, k);
      if (!(diag > 0.0)) throw SingularMatrixError("normal equations matrix is not positive-definite");
      at(j, j) = std::sqrt(diag);
      for (std::size_t i = j + 1; i < d_; ++i) {
        double v = at(i, j);
        for (std::size_t k = 0; k < j; ++k) v -= at(i, k) * at(j, k);
        at(i, j) = v / at(j, j);
      }
    }
  }

  // Solves A z = b in place.
  void solve(std::vector<double>& b) const {
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t k = 0; k < i; ++k) b[i] -= at(i, k) * b[k];
      b[i] /= at(i, i);
    }
    for (std::size_t i = d_; i-- > 0;) {
      for (std::size_t k = i + 1; k < d_; ++k) b[i] -= at(k, i) * b[k];
      b[i] /= at(i, i);
    }
  }

  // Diagonal of A^-1 (solve against unit vectors).
  std::vector<double> inverse_diagonal() const {
    std::vector<double> diag(d_);
    std::vector<double> e(d_);
    for (std::size_t j = 0; j < d_; ++j) {
      std::fill(e.begin(), e.end(), 0.0);
      e[j] = 1.0;
      solve(e);
      diag[j] = e[j];
    }
    return diag;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return l_[i * d_ + j]; }
  double at(std::size_t i, std::size_t j) const { return l_[i * d_ + j]; }

  std::vector<double> l_;
  std::size_t d_;
};

LinearModel fit_design(const std::vector<double>& design, std::size_t n, std::size_t d,
                       std::span<const double> y) {
  // Accumulate X'X (row-major) and X'y.
  std::vector<double> xtx(d * d, 0.0);
  std::vector<double> xty(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = design.data() + r * d;
    for (std::size_t i = 0; i < d; ++i) {
      xty[i] += row[i] * y[r];
      for (std::size_t j = i; j < d; ++j) xtx[i * d + j] += row[i] * row[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) xtx[i * d + j] = xtx[j * d + i];

  Cholesky chol(xtx, d);
  std::vector<double> beta = xty;
  chol.solve(beta);

  LinearModel model;
  model.beta = std::move(beta);
  model.xtx_inv_diag = chol.inverse_diagonal();
  model.n = n;
  model.p = d - 1;
  double sum_y2 = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = design.data() + r * d;
    double pred = 0.0;
    for (std::size_t i = 0; i < d; ++i) pred += model.beta[i] * row[i];
    double resid = y[r] - pred;
    model.rss += resid * resid;
    sum_y2 += y[r] * y[r];
  }
  // Residuals of an exactly-fitting dataset come back as solver round-off;
  // below 1e-12 of the response RMS the fit is perfect and sigma is zero.
  if (model.rss <= 1e-24 * sum_y2) model.rss = 0.0;
  return model;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

double LinearModel::sigma2() const {
  if (n <= p + 1) throw std::invalid_argument("sigma2 undefined: n <= p + 1");
  return rss / static_cast<double>(n - p - 1);
}

double LinearModel::predict(std::span<const double> features) const {
  double v = beta[0];
  for (std::size_t i = 0; i < features.size(); ++i) v += beta[i + 1] * features[i];
  return v;
}

LinearModel ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y lengths differ");
  std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("ols_fit needs n > p + 1 = 2");
  std::vector<double> design(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    design[i * 2] = 1.0;
    design[i * 2 + 1] = x[i];
  }
  return fit_design(design, n, 2, y);
}

LinearModel ols_fit(const std::vector<std::vector<double>>& rows, std::span<const double> y) {
  if (rows.size() != y.size()) throw std::invalid_argument("x and y lengths differ");
  if (rows.empty()) throw std::invalid_argument("empty design");
  std::size_t n = rows.size();
  std::size_t p = rows[0].size();
  if (n <= p + 1) throw std::invalid_argument("ols_fit needs n > p + 1");
  std::vector<double> design(n * (p + 1));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != p) throw std::invalid_argument("ragged design matrix");
    design[i * (p + 1)] = 1.0;
    for (std::size_t j = 0; j < p; ++j) design[i * (p + 1) + 1 + j] = rows[i][j];
  }
  return fit_design(design, n, p + 1, y);
}

std::vector<double> t_statistics(const LinearModel& model) {
  double sigma = std::sqrt(model.sigma2());
  std::vector<double> t(model.beta.size());
  for (std::size_t j = 0; j < model.beta.size(); ++j) {
    if (model.beta[j] == 0.0) {
      t[j] = 0.0;
    } else if (sigma == 0.0) {
      t[j] = model.beta[j] > 0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
    } else {
      t[j] = model.beta[j] / (sigma * std::sqrt(model.xtx_inv_diag[j]));
    }
  }
  return t;
}

Evaluation evaluate_predictions(std::span<const double> y_pred, std::span<const double> y,
                                std::size_t p) {
  if (y_pred.size() != y.size() || y.empty())
    throw std::invalid_argument("evaluate needs equal-length non-empty inputs");
  const std::size_t n = y.size();
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - y_pred[i];
    rss += r * r;
  }
  double ybar = mean_of(y);
  double tss = 0.0;
  for (double v : y) tss += (v - ybar) * (v - ybar);

  Evaluation ev;
  ev.mse = rss / static_cast<double>(n);
  if (tss > 0.0) {
    double r2 = 1.0 - rss / tss;
    ev.r2 = r2;
    if (n > p + 1)
      ev.adjusted_r2 =
          1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - p - 1);
  }

  // Maximized Gaussian likelihood with sigma^2 = RSS/n; degenerate (infinite)
  // on a perfect fit.
  double k = static_cast<double>(p) + 2.0;
  if (rss == 0.0) {
    ev.aic = -std::numeric_limits<double>::infinity();
    ev.bic = -std::numeric_limits<double>::infinity();
  } else {
    double sigma2_ml = rss / static_cast<double>(n);
    double neg2logl = static_cast<double>(n) * (std::log(2.0 * kPi * sigma2_ml) + 1.0);
    ev.aic = neg2logl + 2.0 * k;
    ev.bic = neg2logl + std::log(static_cast<double>(n)) * k;
  }
  return ev;
}

Evaluation evaluate(const LinearModel& model, std::span<const double> x,
                    std::span<const double> y) {
  std::vector<double> pred(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pred[i] = model.predict1(x[i]);
  return evaluate_predictions(pred, y, model.p);
}

// ---------------------------------------------------------------------------
// Regression tree
// ---------------------------------------------------------------------------

namespace {

struct SplitChoice {
  bool found = false;
  double threshold = 0.0;
  std::size_t left_count = 0;  // in sorted order
};

// Best variance-reduction split over midpoints of consecutive distinct xs.
// xs/ys are sorted by x. Ties on gain keep the lowest threshold.
SplitChoice best_split(std::span<const double> xs, std::span<const double> ys,
                       int min_samples_leaf) {
  SplitChoice best;
  const std::size_t n = xs.size();
  double total = 0.0;
  for (double v : ys) total += v;

  double left_sum = 0.0;
  double best_score = -1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    left_sum += ys[i];
    if (xs[i] == xs[i + 1]) continue;  // not a boundary between distinct xs
    std::size_t nl = i + 1;
    std::size_t nr = n - nl;
    if (nl < static_cast<std::size_t>(min_samples_leaf) ||
        nr < static_cast<std::size_t>(min_samples_leaf))
      continue;
    // Minimizing weighted child variance == maximizing
    // nl*meanL^2 + nr*meanR^2 (total sum of squares is fixed).
    double right_sum = total - left_sum;
    double score = left_sum * left_sum / static_cast<double>(nl) +
                   right_sum * right_sum / static_cast<double>(nr);
    if (score > best_score) {
      best_score = score;
      best.found = true;
      best.threshold = xs[i] + 0.5 * (xs[i + 1] - xs[i]);
      best.left_count = nl;
    }
  }
  return best;
}

struct TreeBuilder {
  RegressionTree& tree;
  int max_depth;
  int min_samples_leaf;

  int build(std::span<double> xs, std::span<double> ys, int depth) {
    double mean = mean_of(ys);
    int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(RegressionTree::Node{0.0, -1, -1, mean, ys.size()});

    if (depth >= max_depth) return node_id;
    bool constant_y = std::all_of(ys.begin(), ys.end(), [&](double v) { return v == ys[0]; });
    if (constant_y) return node_id;
    if (ys.size() < 2 * static_cast<std::size_t>(min_samples_leaf)) return node_id;

    SplitChoice split = best_split(xs, ys, min_samples_leaf);
    if (!split.found) return node_id;

    tree.nodes[static_cast<std::size_t>(node_id)].threshold = split.threshold;
    int left = build(xs.subspan(0, split.left_count), ys.subspan(0, split.left_count), depth + 1);
    int right = build(xs.subspan(split.left_count), ys.subspan(split.left_count), depth + 1);
    tree.nodes[static_cast<std::size_t>(node_id)].left = left;
    tree.nodes[static_cast<std::size_t>(node_id)].right = right;
    return node_id;
  }
};

}  // namespace

RegressionTree tree_fit(std::span<const double> x, std::span<const double> y, int max_depth,
                        int min_samples_leaf) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y lengths differ");
  if (x.empty()) throw std::invalid_argument("tree_fit needs at least one sample");
  if (max_depth < 0 || min_samples_leaf < 1)
    throw std::invalid_argument("bad tree hyperparameters");
  if (x.size() < static_cast<std::size_t>(min_samples_leaf))
    throw std::invalid_argument("fewer samples than min_samples_leaf");

  // Sort once by x; subtrees recurse on contiguous ranges.
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> xs(x.size());
  std::vector<double> ys(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }

  RegressionTree tree;
  tree.max_depth = max_depth;
  tree.min_samples_leaf = min_samples_leaf;
  TreeBuilder{tree, max_depth, min_samples_leaf}.build(xs, ys, 0);
  return tree;
}

double RegressionTree::predict(double x) const {
  std::size_t node = 0;
  for (;;) {
    const Node& n = nodes[node];
    if (n.left < 0) return n.value;
    node = static_cast<std::size_t>(x < n.threshold ? n.left : n.right);
  }
}

std::size_t RegressionTree::leaf_count() const {
  std::size_t c = 0;
  for (const Node& n : nodes) c += n.left < 0;
  return c;
}

double tree_predict(const RegressionTree& tree, double x) { return tree.predict(x); }

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "ols") return ModelKind::Ols;
  if (name == "tree") return ModelKind::Tree;
  throw std::invalid_argument("unknown model kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  if (n < static_cast<std::size_t>(k)) throw std::invalid_argument("n < k");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);

  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t base = n / static_cast<std::size_t>(k);
  std::size_t extra = n % static_cast<std::size_t>(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::size_t len = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return folds;
}

CvScores kfold_cv(std::span<const double> x, std::span<const double> y, int k, ModelKind kind,
                  std::uint64_t seed, const TreeParams& tree_params) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y lengths differ");
  auto folds = kfold_indices(x.size(), k, seed);

  CvScores scores;
  scores.k = k;
  scores.seed = seed;

  std::vector<double> train_x;
  std::vector<double> train_y;
  for (const auto& fold : folds) {
    train_x.clear();
    train_y.clear();
    std::vector<bool> held(x.size(), false);
    for (std::size_t i : fold) held[i] = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!held[i]) {
        train_x.push_back(x[i]);
        train_y.push_back(y[i]);
      }
    }

    std::vector<double> pred(fold.size());
    std::size_t p = 1;
    if (kind == ModelKind::Ols) {
      LinearModel m = ols_fit(train_x, train_y);
      for (std::size_t i = 0; i < fold.size(); ++i) pred[i] = m.predict1(x[fold[i]]);
    } else {
      RegressionTree t =
          tree_fit(train_x, train_y, tree_params.max_depth, tree_params.min_samples_leaf);
      for (std::size_t i = 0; i < fold.size(); ++i) pred[i] = t.predict(x[fold[i]]);
      p = t.leaf_count();
    }

    std::vector<double> truth(fold.size());
    for (std::size_t i = 0; i < fold.size(); ++i) truth[i] = y[fold[i]];
    Evaluation ev = evaluate_predictions(pred, truth, p);
    scores.fold_mse.push_back(ev.mse);
    scores.fold_r2.push_back(ev.r2.value_or(std::numeric_limits<double>::quiet_NaN()));
  }

  scores.mse_mean = mean_of(scores.fold_mse);
  scores.mse_stddev = stddev_of(scores.fold_mse, scores.mse_mean);
  std::vector<double> defined_r2;
  for (double r : scores.fold_r2)
    if (!std::isnan(r)) defined_r2.push_back(r);
  if (!defined_r2.empty()) {
    scores.r2_mean = mean_of(defined_r2);
    scores.r2_stddev = stddev_of(defined_r2, scores.r2_mean);
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Impact model fits
// ---------------------------------------------------------------------------

KyleLambda kyle_lambda(std::span<const ImbalanceSample> samples, const KyleRegion& region) {
  if (samples.empty()) throw std::invalid_argument("no imbalance samples");

  double cutoff = 0.0;
  if (region.abs_cutoff) {
    cutoff = *region.abs_cutoff;
  } else {
    if (!(region.quantile > 0.0 && region.quantile <= 1.0))
      throw std::invalid_argument("quantile must be in (0, 1]");
    std::vector<double> abs_dv(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
      abs_dv[i] = std::abs(static_cast<double>(samples[i].delta_v));
    std::sort(abs_dv.begin(), abs_dv.end());
    // Nearest-rank quantile.
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(region.quantile * static_cast<double>(abs_dv.size())));
    cutoff = abs_dv[std::min(abs_dv.size() - 1, rank == 0 ? 0 : rank - 1)];
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (const ImbalanceSample& s : samples) {
    if (std::abs(static_cast<double>(s.delta_v)) <= cutoff) {
      xs.push_back(static_cast<double>(s.delta_v));
      ys.push_back(s.delta_m_cents);
    }
  }
  if (xs.size() < 30) {
    throw std::invalid_argument("only " + std::to_string(xs.size()) +
                                " samples inside linear region |delta_v| <= " +
                                std::to_string(cutoff) + "; need 30");
  }

  KyleLambda out;
  out.model = ols_fit(xs, ys);
  out.lambda = out.model.slope();
  out.region_lo = -cutoff;
  out.region_hi = cutoff;
  out.n_in_region = xs.size();
  return out;
}

PowerLaw power_law_fit(std::span<const double> volume_fraction, std::span<const double> impact) {
  if (volume_fraction.size() != impact.size())
    throw std::invalid_argument("x and y lengths differ");
  std::vector<double> lx(volume_fraction.size());
  std::vector<double> ly(impact.size());
  for (std::size_t i = 0; i < volume_fraction.size(); ++i) {
    if (!(volume_fraction[i] > 0.0) || !(impact[i] > 0.0))
      throw std::invalid_argument("power law fit needs strictly positive inputs");
    lx[i] = std::log(volume_fraction[i]);
    ly[i] = std::log(impact[i]);
  }
  PowerLaw out;
  out.model = ols_fit(lx, ly);
  out.exponent = out.model.slope();
  out.prefactor = std::exp(out.model.intercept());
  return out;
}

}  // namespace lobimpact

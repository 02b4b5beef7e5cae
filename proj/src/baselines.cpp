#include "posture/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace posture {

namespace {

Eigen::Vector3d vec(const MeanFeature3& f) { return {f.mean_x, f.mean_y, f.mean_z}; }

/// Classes of label_set that occur in y, in label_set order.
LabelSet present_classes(const std::vector<PostureLabel>& y, const LabelSet& label_set) {
  LabelSet out;
  for (PostureLabel l : label_set) {
    if (std::find(y.begin(), y.end(), l) != y.end()) out.push_back(l);
  }
  for (PostureLabel l : y) label_index(label_set, l);
  return out;
}

std::size_t argmax_first(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

struct BinaryResult {
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  double b = 0.0;
  bool converged = true;
};

// min 0.5 a'Qa - e'a  s.t. 0 <= a <= C, y'a = 0, Q_ij = y_i y_j x_i.x_j
BinaryResult solve_binary(const std::vector<Eigen::Vector3d>& x, const std::vector<double>& y, const SvmParams& p) {
  const std::size_t n = x.size();
  Eigen::MatrixXd Q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = y[i] * y[j] * x[i].dot(x[j]);
    }
  }
  std::vector<double> alpha(n, 0.0), grad(n, -1.0);
  const double C = p.C;
  const auto up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
  const auto low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };

  BinaryResult res;
  const std::size_t max_iter = p.max_epochs * std::max<std::size_t>(n, 1);
  std::size_t iter = 0;
  for (;; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity(), gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i == n || j == n || gmax - gmin < p.tolerance) break;
    if (iter >= max_iter) {
      res.converged = false;
      break;
    }
    const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
    const double old_ai = alpha[i], old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = Q(I, I) + Q(J, J) + 2.0 * Q(I, J);
      if (quad <= 0) quad = 1e-12;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = Q(I, I) + Q(J, J) - 2.0 * Q(I, J);
      if (quad <= 0) quad = 1e-12;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_ai, dj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      const auto T = static_cast<Eigen::Index>(t);
      grad[t] += Q(T, I) * di + Q(T, J) * dj;
    }
  }

  // Offset from free vectors, or the midpoint of the feasible interval.
  double sum_free = 0.0, ub = std::numeric_limits<double>::infinity(), lb = -ub;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] > 0 && alpha[t] < C) {
      sum_free += yg;
      ++n_free;
    } else if ((alpha[t] >= C && y[t] < 0) || (alpha[t] <= 0 && y[t] > 0)) {
      ub = std::min(ub, yg);
    } else {
      lb = std::max(lb, yg);
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  for (std::size_t t = 0; t < n; ++t) res.w += alpha[t] * y[t] * x[t];
  res.b = -rho;
  return res;
}

}  // namespace

MeanFeature3 mean_features(const Episode& ep) {
  if (ep.samples.empty()) throw Error(Errc::EmptyEpisode, "episode '" + ep.id + "' has no samples");
  double sx = 0, sy = 0, sz = 0;
  for (const auto& s : ep.samples) {
    sx += s.x;
    sy += s.y;
    sz += s.z;
  }
  const double n = static_cast<double>(ep.samples.size());
  return {sx / n, sy / n, sz / n};
}

LdaModel lda_fit(const std::vector<MeanFeature3>& X, const std::vector<PostureLabel>& y, const LabelSet& label_set,
                 const LdaParams& params) {
  if (X.size() != y.size()) throw Error(Errc::DimensionMismatch, "rows and labels differ in size");
  LdaModel m;
  m.label_set = present_classes(y, label_set);
  const std::size_t K = m.label_set.size();
  if (K < 2) throw Error(Errc::UnknownClassCount, "LDA needs at least two classes, got " + std::to_string(K));
  const std::size_t N = X.size();

  std::vector<Eigen::Vector3d> means(K, Eigen::Vector3d::Zero());
  std::vector<std::size_t> counts(K, 0);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t k = label_index(m.label_set, y[i]);
    means[k] += vec(X[i]);
    counts[k]++;
  }
  for (std::size_t k = 0; k < K; ++k) means[k] /= static_cast<double>(counts[k]);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < N; ++i) {
    const Eigen::Vector3d d = vec(X[i]) - means[label_index(m.label_set, y[i])];
    cov += d * d.transpose();
  }
  if (N > K) cov /= static_cast<double>(N - K);
  if (params.ridge) {
    double r = 1e-6 * cov.trace() / 3.0;
    if (!(r > 0.0)) r = 1e-12;
    cov.diagonal().array() += r;
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(cov);
  if (!lu.isInvertible()) throw Error(Errc::SingularCovariance, "pooled covariance is singular");
  const Eigen::Matrix3d inv = lu.inverse();

  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      m.covariance[r * 3 + c] = cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    m.class_means.push_back({means[k](0), means[k](1), means[k](2)});
    m.priors.push_back(static_cast<double>(counts[k]) / static_cast<double>(N));
    const Eigen::Vector3d a = inv * means[k];
    m.coef.push_back({a(0), a(1), a(2)});
    m.intercept.push_back(-0.5 * means[k].dot(a) + std::log(m.priors.back()));
  }
  return m;
}

std::vector<double> lda_scores(const LdaModel& model, const MeanFeature3& x) {
  if (model.coef.empty()) throw Error(Errc::UnfittedModel, "LDA model is empty");
  const auto v = x.as_array();
  std::vector<double> s(model.coef.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k] = model.intercept[k] + model.coef[k][0] * v[0] + model.coef[k][1] * v[1] + model.coef[k][2] * v[2];
  }
  return s;
}

PostureLabel lda_predict(const LdaModel& model, const MeanFeature3& x) {
  return model.label_set[argmax_first(lda_scores(model, x))];
}

LinearSvmModel svm_fit(const std::vector<MeanFeature3>& X, const std::vector<PostureLabel>& y,
                       const LabelSet& label_set, const SvmParams& params) {
  if (X.size() != y.size()) throw Error(Errc::DimensionMismatch, "rows and labels differ in size");
  if (!(params.C > 0.0)) throw Error(Errc::InvalidArgument, "C must be positive");
  LinearSvmModel m;
  m.params = params;
  m.label_set = present_classes(y, label_set);
  if (m.label_set.size() < 2) {
    throw Error(Errc::UnknownClassCount, "SVM needs at least two classes, got " + std::to_string(m.label_set.size()));
  }
  std::vector<Eigen::Vector3d> xs;
  xs.reserve(X.size());
  for (const auto& f : X) xs.push_back(vec(f));

  for (PostureLabel cls : m.label_set) {
    std::vector<double> yy;
    yy.reserve(y.size());
    for (PostureLabel l : y) yy.push_back(l == cls ? 1.0 : -1.0);
    const BinaryResult r = solve_binary(xs, yy, params);
    m.weights.push_back({r.w(0), r.w(1), r.w(2)});
    m.biases.push_back(r.b);
    m.converged = m.converged && r.converged;
  }
  return m;
}

std::vector<double> svm_decision_values(const LinearSvmModel& model, const MeanFeature3& x) {
  if (model.weights.empty()) throw Error(Errc::UnfittedModel, "SVM model is empty");
  const auto v = x.as_array();
  std::vector<double> d(model.weights.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] = model.biases[k] + model.weights[k][0] * v[0] + model.weights[k][1] * v[1] + model.weights[k][2] * v[2];
  }
  return d;
}

PostureLabel svm_predict(const LinearSvmModel& model, const MeanFeature3& x) {
  return model.label_set[argmax_first(svm_decision_values(model, x))];
}

}  // namespace posture

#include "steerftrl/mirror.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace steerftrl {

Vector project_zero_sum(const Vector& v) {
  return v.array() - v.mean();
}

RegularizerKind regularizer_from_name(const std::string& name) {
  if (name == "neg_entropy") return RegularizerKind::NegEntropy;
  if (name == "squared_norm") return RegularizerKind::SquaredNorm;
  throw DomainError("unknown regularizer: " + name);
}

std::string regularizer_name(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::NegEntropy: return "neg_entropy";
    case RegularizerKind::SquaredNorm: return "squared_norm";
  }
  throw DomainError("unknown regularizer");
}

Regularizer::Regularizer(RegularizerKind kind, int dim) : kind_(kind), dim_(dim) {
  if (dim < 2) throw DomainError("regularizer dimension must be at least 2");
}

double Regularizer::value(const Vector& x) const {
  if (x.size() != dim_) throw DomainError("regularizer input has the wrong length");
  switch (kind_) {
    case RegularizerKind::NegEntropy: {
      double v = 0;
      for (int i = 0; i < dim_; ++i)
        if (x[i] > 0) v += x[i] * std::log(x[i]);
      return v;
    }
    case RegularizerKind::SquaredNorm:
      return 0.5 * x.squaredNorm();
  }
  throw DomainError("unknown regularizer");
}

Vector Regularizer::gradient(const Vector& x) const {
  if (x.size() != dim_) throw DomainError("regularizer input has the wrong length");
  switch (kind_) {
    case RegularizerKind::NegEntropy: {
      if (x.minCoeff() <= 0)
        throw DomainError("entropy gradient needs strictly positive coordinates");
      return x.array().log() + 1.0;
    }
    case RegularizerKind::SquaredNorm:
      return x;
  }
  throw DomainError("unknown regularizer");
}

Matrix Regularizer::hessian(const Vector& x) const {
  if (x.size() != dim_) throw DomainError("regularizer input has the wrong length");
  switch (kind_) {
    case RegularizerKind::NegEntropy: {
      if (x.minCoeff() <= 0)
        throw DomainError("entropy hessian needs strictly positive coordinates");
      return x.cwiseInverse().asDiagonal();
    }
    case RegularizerKind::SquaredNorm:
      return Matrix::Identity(dim_, dim_);
  }
  throw DomainError("unknown regularizer");
}

Vector Regularizer::choice(const Vector& y) const {
  if (y.size() != dim_) throw DomainError("choice-map input has the wrong length");
  switch (kind_) {
    case RegularizerKind::NegEntropy: {
      Vector shifted = y.array() - y.maxCoeff();
      Vector e = shifted.array().exp();
      return e / e.sum();
    }
    case RegularizerKind::SquaredNorm: {
      // Euclidean projection onto the simplex via the sorted threshold.
      std::vector<double> w(y.data(), y.data() + dim_);
      std::sort(w.begin(), w.end(), std::greater<double>());
      double cumulative = 0, tau = 0;
      int support = 0;
      for (int k = 0; k < dim_; ++k) {
        cumulative += w[k];
        double candidate = (cumulative - 1.0) / (k + 1);
        if (w[k] - candidate > 0) {
          support = k + 1;
          tau = candidate;
        }
      }
      (void)support;
      return (y.array() - tau).max(0.0);
    }
  }
  throw DomainError("unknown regularizer");
}

Matrix Regularizer::choice_jacobian_at(const Vector& x) const {
  if (x.size() != dim_) throw DomainError("choice-map input has the wrong length");
  if (x.minCoeff() <= kInteriorEpsilon)
    throw DomainError("choice-map jacobian is degenerate on the simplex boundary");
  // Differentiate the stationarity system grad h(x) = y + lambda 1,
  // <1, x> = 1 through the bordered linear solve.
  const int n = dim_;
  Matrix bordered = Matrix::Zero(n + 1, n + 1);
  bordered.topLeftCorner(n, n) = hessian(x);
  bordered.topRightCorner(n, 1).setOnes();
  bordered.bottomLeftCorner(1, n).setOnes();
  Matrix rhs = Matrix::Zero(n + 1, n);
  rhs.topRows(n).setIdentity();
  Matrix solution = bordered.partialPivLu().solve(rhs);
  return solution.topRows(n);
}

Matrix Regularizer::choice_jacobian(const Vector& y) const {
  return choice_jacobian_at(choice(y));
}

Vector Regularizer::mirror_inverse(const Vector& x) const {
  if (x.size() != dim_) throw DomainError("mirror-inverse input has the wrong length");
  if (!is_simplex_point(x) || x.minCoeff() <= kInteriorEpsilon)
    throw DomainError("mirror inverse is defined on interior simplex points");
  return project_zero_sum(gradient(x));
}

Vector choice_newton(const Regularizer& reg, const Vector& y, double tol,
                     int max_iter) {
  const int n = reg.dim();
  if (y.size() != n) throw DomainError("choice-map input has the wrong length");
  Vector x = Vector::Constant(n, 1.0 / n);
  double lambda = 0;
  for (int it = 0; it < max_iter; ++it) {
    Vector stat = reg.gradient(x) - y - Vector::Constant(n, lambda);
    double feas = x.sum() - 1.0;
    double residual = std::max(stat.lpNorm<Eigen::Infinity>(), std::abs(feas));
    if (residual < tol) return x;

    Matrix system = Matrix::Zero(n + 1, n + 1);
    system.topLeftCorner(n, n) = reg.hessian(x);
    system.topRightCorner(n, 1) = -Vector::Ones(n);
    system.bottomLeftCorner(1, n).setOnes();
    Vector rhs(n + 1);
    rhs.head(n) = -stat;
    rhs[n] = -feas;
    Vector step = system.partialPivLu().solve(rhs);

    double alpha = 1.0;
    for (int i = 0; i < n; ++i)
      if (step[i] < 0) alpha = std::min(alpha, -0.9 * x[i] / step[i]);
    x += alpha * step.head(n);
    lambda += alpha * step[n];
  }
  throw std::runtime_error("choice-map newton iteration did not converge");
}

RegularizerBundle::RegularizerBundle(const FiniteGame& game,
                                     std::vector<RegularizerKind> kinds) {
  if (kinds.size() != static_cast<std::size_t>(game.num_learners()))
    throw DomainError("one regularizer per learner is required");
  for (int i = 0; i < game.num_learners(); ++i) {
    offsets_.push_back(total_);
    parts_.emplace_back(kinds[i], game.learner_actions()[i]);
    total_ += game.learner_actions()[i];
  }
}

RegularizerBundle::RegularizerBundle(const FiniteGame& game, RegularizerKind kind)
    : RegularizerBundle(game,
                        std::vector<RegularizerKind>(game.num_learners(), kind)) {}

std::vector<RegularizerKind> RegularizerBundle::kinds() const {
  std::vector<RegularizerKind> ks;
  ks.reserve(parts_.size());
  for (const Regularizer& r : parts_) ks.push_back(r.kind());
  return ks;
}

StrategyProfile RegularizerBundle::choice(const Vector& z) const {
  if (z.size() != total_) throw DomainError("dual state has the wrong length");
  StrategyProfile p;
  for (std::size_t i = 0; i < parts_.size(); ++i)
    p.blocks.push_back(parts_[i].choice(z.segment(offsets_[i], parts_[i].dim())));
  return p;
}

Vector RegularizerBundle::mirror_inverse(const StrategyProfile& x) const {
  if (x.num_learners() != num_learners())
    throw DomainError("profile has the wrong number of learners");
  Vector z(total_);
  for (std::size_t i = 0; i < parts_.size(); ++i)
    z.segment(offsets_[i], parts_[i].dim()) = parts_[i].mirror_inverse(x.blocks[i]);
  return z;
}

Matrix RegularizerBundle::jacobian_apply(const StrategyProfile& x,
                                         const Matrix& cols) const {
  if (x.num_learners() != num_learners())
    throw DomainError("profile has the wrong number of learners");
  if (cols.rows() != total_) throw DomainError("tangent matrix has the wrong height");
  Matrix out(total_, cols.cols());
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    Matrix dq = parts_[i].choice_jacobian_at(x.blocks[i]);
    out.middleRows(offsets_[i], parts_[i].dim()) =
        dq * cols.middleRows(offsets_[i], parts_[i].dim());
  }
  return out;
}

EtaFields eta_fields(const FiniteGame& game, const RegularizerBundle& bundle,
                     const StrategyProfile& profile) {
  game.validate_profile(profile);
  if (!profile.is_interior())
    throw DomainError("vector fields are evaluated at interior profiles");
  const int m = game.controller_actions();
  Matrix pushed = bundle.jacobian_apply(profile, game.stacked_payoff(profile));
  EtaFields fields;
  fields.drift = pushed.rowwise().sum() / m;
  fields.controls.reserve(m - 1);
  for (int k = 0; k + 1 < m; ++k)
    fields.controls.push_back(pushed.col(k) - pushed.col(m - 1));
  return fields;
}

}  // namespace steerftrl

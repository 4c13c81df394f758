#pragma once

#include <string>
#include <vector>

#include "steerftrl/game.hpp"

namespace steerftrl {

// Projection onto the zero-sum hyperplane: v - mean(v).
Vector project_zero_sum(const Vector& v);

enum class RegularizerKind { NegEntropy, SquaredNorm };

RegularizerKind regularizer_from_name(const std::string& name);
std::string regularizer_name(RegularizerKind kind);

// Strongly convex simplex regularizer together with the maps it
// induces: the choice map y -> argmax_x <x,y> - h(x) over the simplex,
// its Jacobian, and the inverse of the induced mirror diffeomorphism.
class Regularizer {
 public:
  Regularizer(RegularizerKind kind, int dim);

  RegularizerKind kind() const { return kind_; }
  int dim() const { return dim_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;

  // Closed-form choice map (softmax, or Euclidean simplex projection).
  Vector choice(const Vector& y) const;

  // Jacobian of the choice map at y, computed from the bordered
  // first-order system at x = choice(y). Requires x interior; the
  // Jacobian is degenerate on the boundary.
  Matrix choice_jacobian(const Vector& y) const;

  // Same Jacobian parameterized by the interior primal point directly.
  Matrix choice_jacobian_at(const Vector& x) const;

  // Inverse of the mirror map: the zero-sum representative z with
  // choice(z) = x, namely the projected gradient of h at interior x.
  Vector mirror_inverse(const Vector& x) const;

 private:
  RegularizerKind kind_;
  int dim_;
};

// Generic KKT solve of the choice-map optimality system by a damped
// Newton iteration; the closed forms above are cross-checked against
// it, and regularizers added later can fall back on it.
Vector choice_newton(const Regularizer& reg, const Vector& y, double tol = 1e-12,
                     int max_iter = 100);

// One regularizer per learner.
class RegularizerBundle {
 public:
  RegularizerBundle(const FiniteGame& game, std::vector<RegularizerKind> kinds);
  // Same kind for every learner.
  RegularizerBundle(const FiniteGame& game, RegularizerKind kind);

  int num_learners() const { return static_cast<int>(parts_.size()); }
  const Regularizer& part(int learner) const { return parts_.at(learner); }

  // Blockwise choice map applied to a flattened dual state.
  StrategyProfile choice(const Vector& z) const;
  // Flattened blockwise mirror inverse of an interior profile.
  Vector mirror_inverse(const StrategyProfile& x) const;
  // Blockwise choice-map Jacobian at the duals of an interior profile,
  // applied to the columns of a flattened tangent matrix.
  Matrix jacobian_apply(const StrategyProfile& x, const Matrix& cols) const;

  std::vector<RegularizerKind> kinds() const;

 private:
  std::vector<Regularizer> parts_;
  std::vector<int> offsets_;
  int total_ = 0;
};

// Drift and control vector fields of the steered learning dynamics in
// the flattened primal chart at an interior profile: controls[k] is
// the field picked out by controller action k versus the last action,
// and drift is the field of the uniform controller strategy.
struct EtaFields {
  Vector drift;
  std::vector<Vector> controls;
};

EtaFields eta_fields(const FiniteGame& game, const RegularizerBundle& bundle,
                     const StrategyProfile& profile);

}  // namespace steerftrl

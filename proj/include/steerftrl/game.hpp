#pragma once

#include <string>
#include <vector>

#include "steerftrl/common.hpp"

namespace steerftrl {

// Dense payoff tensor for one learner, indexed as
// (own action, controller action, other learners' actions in
// increasing player order). Row-major storage.
class PayoffTensor {
 public:
  PayoffTensor() = default;
  PayoffTensor(std::vector<int> shape, std::vector<double> data);

  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& data() const { return data_; }
  int rank() const { return static_cast<int>(shape_.size()); }

  double at(const std::vector<int>& index) const;
  double& at(const std::vector<int>& index);

 private:
  std::size_t flat_index(const std::vector<int>& index) const;

  std::vector<int> shape_;
  std::vector<int> strides_;
  std::vector<double> data_;
};

// Mixed strategies of the learners, one simplex point per learner.
struct StrategyProfile {
  std::vector<Vector> blocks;

  int num_learners() const { return static_cast<int>(blocks.size()); }
  bool is_interior(double eps = kInteriorEpsilon) const;
  Vector flatten() const;
};

// One strategic controller with m actions facing num_learners()
// simultaneous learners; learner i's payoff is multilinear in the
// controller's and the other learners' mixed strategies.
class FiniteGame {
 public:
  FiniteGame(std::vector<int> learner_actions, int controller_actions,
             std::vector<PayoffTensor> payoffs,
             std::vector<std::string> action_labels = {});

  int num_learners() const { return static_cast<int>(learner_actions_.size()); }
  int controller_actions() const { return controller_actions_; }
  const std::vector<int>& learner_actions() const { return learner_actions_; }
  const PayoffTensor& payoff(int learner) const { return payoffs_.at(learner); }
  const std::vector<std::string>& action_labels() const { return action_labels_; }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  // Sum of learner action counts; the length of a flattened profile.
  int total_actions() const { return total_actions_; }
  // Sum of (n_i - 1); the dimension of the strategy tangent space.
  int tangent_dim() const { return tangent_dim_; }
  // Offset of learner i's block inside a flattened profile.
  int block_offset(int learner) const { return offsets_.at(learner); }

  // Effective payoff matrix A_i(x_{-i}) of shape n_i x m obtained by
  // averaging the tensor over the other learners' mixed strategies.
  // Learner i's own entry in `profile` is ignored.
  Matrix payoff_block(int learner, const StrategyProfile& profile) const;

  // Vertical stack of all payoff blocks, shape total_actions() x m.
  Matrix stacked_payoff(const StrategyProfile& profile) const;

  // <x_i, A_i(x_{-i}) u>.
  double expected_payoff(int learner, const StrategyProfile& profile,
                         const Vector& u) const;

  StrategyProfile uniform_profile() const;
  void validate_profile(const StrategyProfile& profile) const;
  void validate_control(const Vector& u) const;

  StrategyProfile unflatten(const Vector& flat) const;

 private:
  std::vector<int> learner_actions_;
  int controller_actions_ = 0;
  std::vector<PayoffTensor> payoffs_;
  std::vector<std::string> action_labels_;
  std::vector<int> offsets_;
  int total_actions_ = 0;
  int tangent_dim_ = 0;
  std::string name_ = "custom";
};

enum class BuiltinGame { Rps, ModifiedRps, Brockett, RegulatedMatchingPennies };

BuiltinGame builtin_from_name(const std::string& name);
std::string builtin_name(BuiltinGame which);

// rps takes one parameter (the self-play payoff, in (-1, 1)); the other
// builtins take none.
FiniteGame make_builtin(BuiltinGame which, const std::vector<double>& params = {});

bool is_simplex_point(const Vector& v, double tol = 1e-9);

}  // namespace steerftrl

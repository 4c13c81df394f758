#include "steerftrl/game.hpp"

#include <cmath>
#include <cstddef>
#include <numeric>

namespace steerftrl {

PayoffTensor::PayoffTensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.empty()) throw DomainError("payoff tensor needs at least one axis");
  std::size_t total = 1;
  for (int s : shape_) {
    if (s <= 0) throw DomainError("payoff tensor axes must be positive");
    total *= static_cast<std::size_t>(s);
  }
  if (data_.size() != total)
    throw DomainError("payoff tensor data length does not match its shape");
  strides_.assign(shape_.size(), 1);
  for (int d = static_cast<int>(shape_.size()) - 2; d >= 0; --d)
    strides_[d] = strides_[d + 1] * shape_[d + 1];
}

std::size_t PayoffTensor::flat_index(const std::vector<int>& index) const {
  if (index.size() != shape_.size())
    throw DomainError("payoff tensor index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t d = 0; d < shape_.size(); ++d) {
    if (index[d] < 0 || index[d] >= shape_[d])
      throw DomainError("payoff tensor index out of range");
    flat += static_cast<std::size_t>(index[d]) * strides_[d];
  }
  return flat;
}

double PayoffTensor::at(const std::vector<int>& index) const {
  return data_[flat_index(index)];
}

double& PayoffTensor::at(const std::vector<int>& index) {
  return data_[flat_index(index)];
}

bool is_simplex_point(const Vector& v, double tol) {
  if (v.size() == 0) return false;
  if (v.minCoeff() < -tol) return false;
  return std::abs(v.sum() - 1.0) <= tol * std::max<double>(1, v.size());
}

bool StrategyProfile::is_interior(double eps) const {
  for (const Vector& x : blocks)
    if (x.size() == 0 || x.minCoeff() <= eps) return false;
  return true;
}

Vector StrategyProfile::flatten() const {
  int total = 0;
  for (const Vector& x : blocks) total += static_cast<int>(x.size());
  Vector flat(total);
  int at = 0;
  for (const Vector& x : blocks) {
    flat.segment(at, x.size()) = x;
    at += static_cast<int>(x.size());
  }
  return flat;
}

FiniteGame::FiniteGame(std::vector<int> learner_actions, int controller_actions,
                       std::vector<PayoffTensor> payoffs,
                       std::vector<std::string> action_labels)
    : learner_actions_(std::move(learner_actions)),
      controller_actions_(controller_actions),
      payoffs_(std::move(payoffs)),
      action_labels_(std::move(action_labels)) {
  if (learner_actions_.empty()) throw DomainError("a game needs at least one learner");
  if (controller_actions_ < 2)
    throw DomainError("the controller needs at least two actions");
  if (payoffs_.size() != learner_actions_.size())
    throw DomainError("one payoff tensor per learner is required");
  const int n = num_learners();
  offsets_.resize(n);
  for (int i = 0; i < n; ++i) {
    if (learner_actions_[i] < 2)
      throw DomainError("each learner needs at least two actions");
    offsets_[i] = total_actions_;
    total_actions_ += learner_actions_[i];
    tangent_dim_ += learner_actions_[i] - 1;

    std::vector<int> expect;
    expect.push_back(learner_actions_[i]);
    expect.push_back(controller_actions_);
    for (int j = 0; j < n; ++j)
      if (j != i) expect.push_back(learner_actions_[j]);
    if (payoffs_[i].shape() != expect)
      throw DomainError("payoff tensor shape for learner " + std::to_string(i + 1) +
                        " does not match the declared action counts");
    for (double v : payoffs_[i].data())
      if (!std::isfinite(v))
        throw DomainError("payoff tensor for learner " + std::to_string(i + 1) +
                          " has a non-finite entry");
  }
}

void FiniteGame::validate_profile(const StrategyProfile& profile) const {
  if (profile.num_learners() != num_learners())
    throw DomainError("strategy profile has the wrong number of learners");
  for (int i = 0; i < num_learners(); ++i) {
    if (profile.blocks[i].size() != learner_actions_[i])
      throw DomainError("strategy for learner " + std::to_string(i + 1) +
                        " has the wrong length");
    if (!is_simplex_point(profile.blocks[i]))
      throw DomainError("strategy for learner " + std::to_string(i + 1) +
                        " is not a simplex point");
  }
}

void FiniteGame::validate_control(const Vector& u) const {
  if (u.size() != controller_actions_)
    throw DomainError("controller strategy has the wrong length");
  if (!is_simplex_point(u))
    throw DomainError("controller strategy is not a simplex point");
}

Matrix FiniteGame::payoff_block(int learner, const StrategyProfile& profile) const {
  if (learner < 0 || learner >= num_learners())
    throw DomainError("learner index out of range");
  if (profile.num_learners() != num_learners())
    throw DomainError("strategy profile has the wrong number of learners");
  const PayoffTensor& tensor = payoffs_[learner];
  const int ni = learner_actions_[learner];
  const int m = controller_actions_;

  std::vector<int> others;
  for (int j = 0; j < num_learners(); ++j)
    if (j != learner) others.push_back(j);
  for (int j : others)
    if (profile.blocks[j].size() != learner_actions_[j])
      throw DomainError("strategy for learner " + std::to_string(j + 1) +
                        " has the wrong length");

  Matrix block = Matrix::Zero(ni, m);
  std::vector<int> index(tensor.rank(), 0);
  const int extra = static_cast<int>(others.size());
  std::vector<int> assignment(extra, 0);
  while (true) {
    double weight = 1.0;
    for (int d = 0; d < extra; ++d)
      weight *= profile.blocks[others[d]][assignment[d]];
    if (weight != 0.0) {
      for (int d = 0; d < extra; ++d) index[2 + d] = assignment[d];
      for (int a = 0; a < ni; ++a) {
        index[0] = a;
        for (int c = 0; c < m; ++c) {
          index[1] = c;
          block(a, c) += weight * tensor.at(index);
        }
      }
    }
    int d = extra - 1;
    while (d >= 0) {
      if (++assignment[d] < learner_actions_[others[d]]) break;
      assignment[d] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return block;
}

Matrix FiniteGame::stacked_payoff(const StrategyProfile& profile) const {
  Matrix stacked(total_actions_, controller_actions_);
  for (int i = 0; i < num_learners(); ++i)
    stacked.middleRows(offsets_[i], learner_actions_[i]) = payoff_block(i, profile);
  return stacked;
}

double FiniteGame::expected_payoff(int learner, const StrategyProfile& profile,
                                   const Vector& u) const {
  validate_control(u);
  return profile.blocks.at(learner).dot(payoff_block(learner, profile) * u);
}

StrategyProfile FiniteGame::uniform_profile() const {
  StrategyProfile p;
  for (int ni : learner_actions_)
    p.blocks.push_back(Vector::Constant(ni, 1.0 / ni));
  return p;
}

StrategyProfile FiniteGame::unflatten(const Vector& flat) const {
  if (flat.size() != total_actions_)
    throw DomainError("flattened profile has the wrong length");
  StrategyProfile p;
  for (int i = 0; i < num_learners(); ++i)
    p.blocks.push_back(flat.segment(offsets_[i], learner_actions_[i]));
  return p;
}

BuiltinGame builtin_from_name(const std::string& name) {
  if (name == "rps") return BuiltinGame::Rps;
  if (name == "modified_rps") return BuiltinGame::ModifiedRps;
  if (name == "brockett") return BuiltinGame::Brockett;
  if (name == "regulated_matching_pennies")
    return BuiltinGame::RegulatedMatchingPennies;
  throw DomainError("unknown builtin game: " + name);
}

std::string builtin_name(BuiltinGame which) {
  switch (which) {
    case BuiltinGame::Rps: return "rps";
    case BuiltinGame::ModifiedRps: return "modified_rps";
    case BuiltinGame::Brockett: return "brockett";
    case BuiltinGame::RegulatedMatchingPennies:
      return "regulated_matching_pennies";
  }
  throw DomainError("unknown builtin game");
}

namespace {

PayoffTensor matrix_game(const Matrix& a) {
  std::vector<double> data;
  data.reserve(a.size());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) data.push_back(a(r, c));
  return PayoffTensor({static_cast<int>(a.rows()), static_cast<int>(a.cols())},
                      std::move(data));
}

FiniteGame make_rps(double eps) {
  if (!(eps > -1.0 && eps < 1.0))
    throw DomainError("rps self-play payoff must lie in (-1, 1)");
  Matrix a(3, 3);
  a << eps, -1, 1,
       1, eps, -1,
       -1, 1, eps;
  FiniteGame g({3}, 3, {matrix_game(a)}, {"rock", "paper", "scissors"});
  g.set_name("rps");
  return g;
}

FiniteGame make_modified_rps() {
  Matrix a(3, 3);
  a << 0, -1, 1,
       1, 0, -1,
       -1, 1, 3;
  FiniteGame g({3}, 3, {matrix_game(a)}, {"rock", "paper", "scissors"});
  g.set_name("modified_rps");
  return g;
}

FiniteGame make_brockett() {
  Matrix a1(2, 3), a2(2, 3), c1(2, 3), c2(2, 3);
  a1 << 1, -1, 0,
        -1, 1, 0;
  a2 << 0, 1, -1,
        0, -1, 1;
  // Learner 3's matrix is x1*c1 + x2*c2 in the other learners' first
  // coordinates, encoded below as indicator terms on pure profiles.
  c1 << 0, 1, -1,
        0, -1, 1;
  c2 << -1, 1, 0,
        1, -1, 0;

  auto constant_tensor = [](const Matrix& a) {
    std::vector<double> data;
    for (int own = 0; own < 2; ++own)
      for (int c = 0; c < 3; ++c)
        for (int o1 = 0; o1 < 2; ++o1)
          for (int o2 = 0; o2 < 2; ++o2) data.push_back(a(own, c));
    return PayoffTensor({2, 3, 2, 2}, std::move(data));
  };

  std::vector<double> t3;
  for (int own = 0; own < 2; ++own)
    for (int c = 0; c < 3; ++c)
      for (int a1i = 0; a1i < 2; ++a1i)
        for (int a2i = 0; a2i < 2; ++a2i)
          t3.push_back((a1i == 0 ? c1(own, c) : 0.0) +
                       (a2i == 0 ? c2(own, c) : 0.0));

  FiniteGame g({2, 2, 2}, 3,
               {constant_tensor(a1), constant_tensor(a2),
                PayoffTensor({2, 3, 2, 2}, std::move(t3))});
  g.set_name("brockett");
  return g;
}

FiniteGame make_regulated_matching_pennies() {
  Matrix b1(2, 2), b2(2, 2), b3(2, 2);
  b1 << 1, 1,
        0, 0;
  b2 << 2, -5,
        -3, 2;
  b3 << 0, 1,
        0, 1;
  const Matrix bs[3] = {b1, b2, b3};

  // Learner 1 gets B_c(a1, a2); learner 2 plays the zero-sum side and
  // gets -B_c(a1, a2).
  std::vector<double> t1, t2;
  for (int own = 0; own < 2; ++own)
    for (int c = 0; c < 3; ++c)
      for (int other = 0; other < 2; ++other) {
        t1.push_back(bs[c](own, other));
        t2.push_back(-bs[c](other, own));
      }

  FiniteGame g({2, 2}, 3,
               {PayoffTensor({2, 3, 2}, std::move(t1)),
                PayoffTensor({2, 3, 2}, std::move(t2))});
  g.set_name("regulated_matching_pennies");
  return g;
}

}  // namespace

FiniteGame make_builtin(BuiltinGame which, const std::vector<double>& params) {
  switch (which) {
    case BuiltinGame::Rps: {
      if (params.size() > 1)
        throw DomainError("rps takes a single parameter");
      return make_rps(params.empty() ? 0.0 : params[0]);
    }
    case BuiltinGame::ModifiedRps:
      if (!params.empty()) throw DomainError("modified_rps takes no parameters");
      return make_modified_rps();
    case BuiltinGame::Brockett:
      if (!params.empty()) throw DomainError("brockett takes no parameters");
      return make_brockett();
    case BuiltinGame::RegulatedMatchingPennies:
      if (!params.empty())
        throw DomainError("regulated_matching_pennies takes no parameters");
      return make_regulated_matching_pennies();
  }
  throw DomainError("unknown builtin game");
}

}  // namespace steerftrl

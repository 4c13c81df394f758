#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steerftrl/mirror.hpp"
#include "steerftrl/rng.hpp"
#include "test_helpers.hpp"

using namespace steerftrl;
using testutil::random_interior_profile;

namespace {

// Central-difference Jacobian of the closed-form choice map; the
// independent reference for every analytic Jacobian in this file.
Matrix fd_choice_jacobian(const Regularizer& reg, const Vector& y, double step) {
  const int n = reg.dim();
  Matrix jac(n, n);
  for (int j = 0; j < n; ++j) {
    Vector hi = y, lo = y;
    hi[j] += step;
    lo[j] -= step;
    jac.col(j) = (reg.choice(hi) - reg.choice(lo)) / (2 * step);
  }
  return jac;
}

Vector softmax(const Vector& y) {
  Vector e = (y.array() - y.maxCoeff()).exp();
  return e / e.sum();
}

}  // namespace

TEST_CASE("zero-sum projection removes the mean") {
  Vector ones = Vector::Ones(3);
  CHECK(project_zero_sum(ones).cwiseAbs().maxCoeff() == 0);
  Vector v(3);
  v << 1, 2, 3;
  Vector expect(3);
  expect << -1, 0, 1;
  CHECK((project_zero_sum(v) - expect).cwiseAbs().maxCoeff() < 1e-15);
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    Vector w(5);
    for (int i = 0; i < 5; ++i) w[i] = rng.uniform(-4, 4);
    Vector once = project_zero_sum(w);
    CHECK(std::abs(once.sum()) < 1e-12);
    CHECK((project_zero_sum(once) - once).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("choice map closed values") {
  Regularizer ent(RegularizerKind::NegEntropy, 3);
  CHECK((ent.choice(Vector::Zero(3)) - Vector::Constant(3, 1.0 / 3)).cwiseAbs().maxCoeff() <
        1e-15);

  Vector logs(3);
  logs << std::log(1.0), std::log(2.0), std::log(3.0);
  Vector expect(3);
  expect << 1.0 / 6, 2.0 / 6, 3.0 / 6;
  CHECK((ent.choice(logs) - expect).cwiseAbs().maxCoeff() < 1e-15);

  Regularizer sq(RegularizerKind::SquaredNorm, 3);
  Vector inside(3);
  inside << 0.6, 0.3, 0.1;
  CHECK((sq.choice(inside) - inside).cwiseAbs().maxCoeff() < 1e-15);

  Vector shifted(3);
  shifted << 0.8, 0.5, 0.2;
  Vector proj = sq.choice(shifted);
  Vector expect_proj = shifted.array() - 0.5 / 3;
  CHECK((proj - expect_proj).cwiseAbs().maxCoeff() < 1e-15);

  Vector outside(3);
  outside << 2.0, 1.0, 0.0;
  Vector corner = sq.choice(outside);
  Vector expect_corner(3);
  expect_corner << 1.0, 0.0, 0.0;
  CHECK((corner - expect_corner).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("choice map is translation invariant") {
  Rng rng(21);
  for (RegularizerKind kind : {RegularizerKind::NegEntropy, RegularizerKind::SquaredNorm}) {
    Regularizer reg(kind, 4);
    for (int t = 0; t < 100; ++t) {
      Vector y(4);
      for (int i = 0; i < 4; ++i) y[i] = rng.uniform(-2, 2);
      double c = rng.uniform(-5, 5);
      Vector shifted = y.array() + c;
      CHECK((reg.choice(y) - reg.choice(shifted)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  Regularizer ent(RegularizerKind::NegEntropy, 3);
  Vector y(3);
  y << 1, 2, 3;
  Vector seven = y.array() + 7.0;
  CHECK((ent.choice(y) - ent.choice(seven)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("choice map matches softmax for negative entropy") {
  Regularizer ent(RegularizerKind::NegEntropy, 5);
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    Vector y(5);
    for (int i = 0; i < 5; ++i) y[i] = rng.uniform(-10, 10);
    CHECK((ent.choice(y) - softmax(y)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("choice outputs satisfy the stationarity relation") {
  Rng rng(33);
  for (RegularizerKind kind : {RegularizerKind::NegEntropy, RegularizerKind::SquaredNorm}) {
    Regularizer reg(kind, 4);
    for (int t = 0; t < 100; ++t) {
      Vector y(4);
      for (int i = 0; i < 4; ++i)
        y[i] = kind == RegularizerKind::SquaredNorm ? rng.uniform(0.1, 0.5)
                                                    : rng.uniform(-3, 3);
      Vector x = reg.choice(y);
      if (x.minCoeff() <= 1e-9) continue;
      Vector r = reg.gradient(x) - y;
      double lambda = -r.mean();
      CHECK((r.array() + lambda).abs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("newton fallback agrees with both closed forms") {
  Rng rng(39);
  Regularizer ent(RegularizerKind::NegEntropy, 4);
  for (int t = 0; t < 25; ++t) {
    Vector y(4);
    for (int i = 0; i < 4; ++i) y[i] = rng.uniform(-2, 2);
    CHECK((choice_newton(ent, y) - ent.choice(y)).cwiseAbs().maxCoeff() < 1e-10);
  }
  Regularizer sq(RegularizerKind::SquaredNorm, 4);
  for (int t = 0; t < 25; ++t) {
    Vector y(4);
    for (int i = 0; i < 4; ++i) y[i] = rng.uniform(0.15, 0.35);
    CHECK((choice_newton(sq, y) - sq.choice(y)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("hessians are positive definite on sampled interior points") {
  Rng rng(45);
  for (RegularizerKind kind : {RegularizerKind::NegEntropy, RegularizerKind::SquaredNorm}) {
    Regularizer reg(kind, 4);
    for (int t = 0; t < 50; ++t) {
      Vector x = rng.interior_simplex_point(4, 1e-3);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(reg.hessian(x));
      CHECK(eig.eigenvalues().minCoeff() > 0);
    }
  }
}

TEST_CASE("jacobian closed values at the center") {
  Regularizer ent(RegularizerKind::NegEntropy, 2);
  Matrix jac = ent.choice_jacobian(Vector::Zero(2));
  Matrix expect(2, 2);
  expect << 0.25, -0.25, -0.25, 0.25;
  CHECK((jac - expect).cwiseAbs().maxCoeff() < 1e-12);
  Matrix fd = fd_choice_jacobian(ent, Vector::Zero(2), 1e-6);
  CHECK((jac - fd).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("negative entropy jacobian equals the replicator form") {
  Regularizer ent(RegularizerKind::NegEntropy, 4);
  Rng rng(61);
  for (int t = 0; t < 100; ++t) {
    Vector y(4);
    for (int i = 0; i < 4; ++i) y[i] = rng.uniform(-2, 2);
    Vector x = ent.choice(y);
    Matrix expect = Matrix(x.asDiagonal()) - x * x.transpose();
    CHECK((ent.choice_jacobian(y) - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("squared norm jacobian is the interior projector") {
  Regularizer sq(RegularizerKind::SquaredNorm, 3);
  Matrix p = Matrix::Identity(3, 3) - Matrix::Constant(3, 3, 1.0 / 3);
  Rng rng(63);
  for (int t = 0; t < 100; ++t) {
    Vector y(3);
    for (int i = 0; i < 3; ++i) y[i] = rng.uniform(0.2, 0.45);
    if (sq.choice(y).minCoeff() <= 1e-6) continue;
    CHECK((sq.choice_jacobian(y) - p).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("jacobians agree with finite differences") {
  Rng rng(65);
  for (RegularizerKind kind : {RegularizerKind::NegEntropy, RegularizerKind::SquaredNorm}) {
    Regularizer reg(kind, 4);
    int checked = 0;
    while (checked < 100) {
      Vector y(4);
      for (int i = 0; i < 4; ++i)
        y[i] = kind == RegularizerKind::SquaredNorm ? rng.uniform(0.15, 0.35)
                                                    : rng.uniform(-2, 2);
      if (reg.choice(y).minCoeff() <= 1e-4) continue;
      Matrix jac = reg.choice_jacobian(y);
      Matrix fd = fd_choice_jacobian(reg, y, 1e-6);
      double scale = std::max(1.0, jac.cwiseAbs().maxCoeff());
      CHECK((jac - fd).cwiseAbs().maxCoeff() / scale < 1e-5);
      ++checked;
    }
  }
}

TEST_CASE("jacobian rows and outputs stay in the tangent space") {
  Rng rng(67);
  Regularizer ent(RegularizerKind::NegEntropy, 5);
  for (int t = 0; t < 50; ++t) {
    Vector y(5);
    for (int i = 0; i < 5; ++i) y[i] = rng.uniform(-2, 2);
    Matrix jac = ent.choice_jacobian(y);
    CHECK((jac * Vector::Ones(5)).cwiseAbs().maxCoeff() < 1e-12);
    Vector v(5);
    for (int i = 0; i < 5; ++i) v[i] = rng.uniform(-1, 1);
    CHECK(std::abs((jac * v).sum()) < 1e-12);
  }
}

TEST_CASE("jacobian refuses boundary outputs") {
  Regularizer sq(RegularizerKind::SquaredNorm, 3);
  Vector y(3);
  y << 5.0, 0.0, 0.0;
  CHECK_THROWS_AS(sq.choice_jacobian(y), DomainError);
}

TEST_CASE("mirror inverse closed values") {
  Regularizer ent(RegularizerKind::NegEntropy, 3);
  CHECK(ent.mirror_inverse(Vector::Constant(3, 1.0 / 3)).cwiseAbs().maxCoeff() < 1e-15);

  Regularizer sq(RegularizerKind::SquaredNorm, 3);
  Vector x(3);
  x << 0.5, 0.3, 0.2;
  Vector z = sq.mirror_inverse(x);
  Vector expect(3);
  expect << 0.5 - 1.0 / 3, 0.3 - 1.0 / 3, 0.2 - 1.0 / 3;
  CHECK((z - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(z[0] - 0.1667) < 5e-5);
  CHECK(std::abs(z[1] + 0.0333) < 5e-5);
  CHECK(std::abs(z[2] + 0.1333) < 5e-5);
  CHECK((sq.choice(z) - x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mirror inverse refuses the boundary") {
  Regularizer ent(RegularizerKind::NegEntropy, 3);
  Vector edge(3);
  edge << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(ent.mirror_inverse(edge), DomainError);
}

TEST_CASE("diffeomorphism round trips") {
  Rng rng(71);
  for (RegularizerKind kind : {RegularizerKind::NegEntropy, RegularizerKind::SquaredNorm}) {
    Regularizer reg(kind, 4);
    for (int t = 0; t < 1000; ++t) {
      Vector x = rng.interior_simplex_point(4, 1e-4);
      Vector z = reg.mirror_inverse(x);
      CHECK(std::abs(z.sum()) < 1e-10);
      CHECK((reg.choice(z) - x).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((reg.mirror_inverse(reg.choice(z)) - z).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("bundle maps operate blockwise") {
  FiniteGame game = make_builtin(BuiltinGame::Brockett);
  RegularizerBundle bundle(game, RegularizerKind::NegEntropy);
  CHECK(bundle.num_learners() == 3);
  Rng rng(73);
  StrategyProfile x = random_interior_profile(game, rng);
  Vector z = bundle.mirror_inverse(x);
  CHECK(z.size() == 6);
  for (int i = 0; i < 3; ++i) {
    Vector zi = z.segment(2 * i, 2);
    CHECK((zi - bundle.part(i).mirror_inverse(x.blocks[i])).cwiseAbs().maxCoeff() <
          1e-15);
  }
  StrategyProfile back = bundle.choice(z);
  for (int i = 0; i < 3; ++i)
    CHECK((back.blocks[i] - x.blocks[i]).cwiseAbs().maxCoeff() < 1e-9);

  RegularizerBundle mixed(game, {RegularizerKind::NegEntropy,
                                 RegularizerKind::SquaredNorm,
                                 RegularizerKind::NegEntropy});
  CHECK(mixed.kinds() == std::vector<RegularizerKind>{RegularizerKind::NegEntropy,
                                                      RegularizerKind::SquaredNorm,
                                                      RegularizerKind::NegEntropy});
  Vector zm = mixed.mirror_inverse(x);
  StrategyProfile backm = mixed.choice(zm);
  for (int i = 0; i < 3; ++i)
    CHECK((backm.blocks[i] - x.blocks[i]).cwiseAbs().maxCoeff() < 1e-9);

  CHECK_THROWS_AS(
      RegularizerBundle(game, std::vector<RegularizerKind>{RegularizerKind::NegEntropy}),
      DomainError);
}

TEST_CASE("regularizer names round trip") {
  CHECK(regularizer_from_name("neg_entropy") == RegularizerKind::NegEntropy);
  CHECK(regularizer_from_name("squared_norm") == RegularizerKind::SquaredNorm);
  CHECK(regularizer_name(RegularizerKind::NegEntropy) == "neg_entropy");
  CHECK(regularizer_name(RegularizerKind::SquaredNorm) == "squared_norm");
  CHECK_THROWS_AS(regularizer_from_name("tsallis"), DomainError);
}

TEST_CASE("eta fields stay in the tangent space") {
  for (BuiltinGame which : {BuiltinGame::Brockett, BuiltinGame::RegulatedMatchingPennies}) {
    FiniteGame game = make_builtin(which);
    RegularizerBundle bundle(game, RegularizerKind::NegEntropy);
    Rng rng(79);
    for (int t = 0; t < 100; ++t) {
      StrategyProfile x = random_interior_profile(game, rng);
      EtaFields fields = eta_fields(game, bundle, x);
      CHECK(static_cast<int>(fields.controls.size()) == game.controller_actions() - 1);
      for (int i = 0; i < game.num_learners(); ++i) {
        int off = game.block_offset(i);
        int len = game.learner_actions()[i];
        CHECK(std::abs(fields.drift.segment(off, len).sum()) < 1e-10);
        for (const Vector& eta : fields.controls)
          CHECK(std::abs(eta.segment(off, len).sum()) < 1e-10);
      }
    }
  }
}

TEST_CASE("eta fields match a finite-difference jacobian oracle") {
  FiniteGame game = make_builtin(BuiltinGame::RegulatedMatchingPennies);
  RegularizerBundle bundle(game, RegularizerKind::NegEntropy);
  Rng rng(83);
  for (int t = 0; t < 20; ++t) {
    StrategyProfile x = random_interior_profile(game, rng, 1e-2);
    Matrix a = game.stacked_payoff(x);
    const int m = game.controller_actions();

    Matrix dq = Matrix::Zero(4, 4);
    for (int i = 0; i < 2; ++i) {
      const Regularizer& reg = bundle.part(i);
      Vector y = reg.gradient(x.blocks[i]);
      dq.block(2 * i, 2 * i, 2, 2) = fd_choice_jacobian(reg, y, 1e-6);
    }

    EtaFields fields = eta_fields(game, bundle, x);
    for (int k = 0; k + 1 < m; ++k) {
      Vector oracle = dq * (a.col(k) - a.col(m - 1));
      CHECK((fields.controls[k] - oracle).cwiseAbs().maxCoeff() < 1e-6);
    }
    Vector drift_oracle = dq * (a * Vector::Ones(m)) / m;
    CHECK((fields.drift - drift_oracle).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("matching pennies fields at the center") {
  FiniteGame game = make_builtin(BuiltinGame::RegulatedMatchingPennies);
  RegularizerBundle bundle(game, RegularizerKind::NegEntropy);
  EtaFields fields = eta_fields(game, bundle, game.uniform_profile());
  CHECK(fields.drift.cwiseAbs().maxCoeff() < 1e-12);
  Vector eta1(4);
  eta1 << 0.25, -0.25, -0.25, 0.25;
  CHECK((fields.controls[0] - eta1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("uniform neutralization kills the brockett drift") {
  FiniteGame game = make_builtin(BuiltinGame::Brockett);
  for (RegularizerKind kind : {RegularizerKind::NegEntropy, RegularizerKind::SquaredNorm}) {
    RegularizerBundle bundle(game, kind);
    Rng rng(89);
    for (int t = 0; t < 50; ++t) {
      StrategyProfile x = random_interior_profile(game, rng, 1e-2);
      EtaFields fields = eta_fields(game, bundle, x);
      CHECK(fields.drift.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("eta fields refuse boundary profiles") {
  FiniteGame game = make_builtin(BuiltinGame::RegulatedMatchingPennies);
  RegularizerBundle bundle(game, RegularizerKind::NegEntropy);
  StrategyProfile edge = testutil::pure_profile(game, {0, 1});
  CHECK_THROWS_AS(eta_fields(game, bundle, edge), DomainError);
}

import numpy as np
import pytest

import steerftrl as sf


def interior(vec, eps=1e-9):
    return np.min(vec) > eps


def test_builtin_game_properties():
    game = sf.make_builtin("rps", [0.0])
    assert game.name == "rps"
    assert game.num_learners == 1
    assert game.learner_actions == [3]
    assert game.controller_actions == 3
    assert game.total_actions == 3
    assert game.tangent_dim == 2

    block = game.payoff_block(0, game.uniform_profile())
    assert isinstance(block, np.ndarray)
    assert block.shape == (3, 3)
    expected = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
    assert np.allclose(block, expected)


def test_two_player_verdicts():
    rps = sf.make_builtin("rps", [0.5])
    report = sf.two_player_verdict(rps)
    assert report["verdict"] == "controllable"
    assert report["rank"] == 2
    assert np.allclose(report["neutralizer"]["u0"], np.ones(3) / 3, atol=1e-9)

    mod = sf.make_builtin("modified_rps")
    report = sf.two_player_verdict(mod)
    assert report["verdict"] == "not_controllable"
    witness = report["witness"]
    assert np.min(witness["slacks"]) >= -1e-9
    assert np.max(np.abs(witness["w"])) == pytest.approx(1.0)

    standalone = sf.monotone_witness(mod)
    assert standalone is not None
    assert sf.monotone_witness(rps) is None


def test_simulate_shapes_and_conservation():
    game = sf.make_builtin("rps", [0.0])
    bundle = sf.RegularizerBundle(game, "neg_entropy")
    x0 = game.uniform_profile()
    schedule = [(np.array([0.6, 0.2, 0.2]), 1.0), (np.array([0.2, 0.2, 0.6]), 0.5)]
    traj = sf.simulate(game, bundle, x0, schedule, dt=1e-3, record_every=10,
                       record_dual=True)
    times = traj["times"]
    primal = traj["primal"]
    dual = traj["dual"]
    assert primal.shape == (times.shape[0], 3)
    assert dual.shape == primal.shape
    assert times[0] == 0.0
    assert times[-1] == pytest.approx(1.5)
    assert np.allclose(primal.sum(axis=1), 1.0, atol=1e-12)
    assert np.allclose(dual.sum(axis=1), 0.0, atol=1e-12)
    assert all(interior(row) for row in primal)


def test_guard_error_surfaces():
    game = sf.make_builtin("modified_rps")
    bundle = sf.RegularizerBundle(game, "neg_entropy")
    push = [(np.array([0.0, 0.0, 1.0]), 30.0)]
    with pytest.raises(sf.GuardError):
        sf.simulate(game, bundle, game.uniform_profile(), push)


def test_plan_and_verify():
    game = sf.make_builtin("rps", [0.0])
    bundle = sf.RegularizerBundle(game, "neg_entropy")
    x0 = sf.StrategyProfile([np.array([0.5, 0.3, 0.2])])
    target = sf.StrategyProfile([np.array([0.2, 0.3, 0.5])])
    plan = sf.plan_two_player(game, bundle, x0, target, margin=0.1)
    assert plan.method == "two_player_exact"
    assert len(plan.schedule) == 1
    u, duration = plan.schedule[0]
    assert duration > 0
    assert np.min(u) > 0 and u.sum() == pytest.approx(1.0)

    gap = sf.verify_plan(game, bundle, x0, plan, dt=1e-3)
    assert gap < 1e-3
    endpoint = plan.predicted_endpoint.blocks[0]
    assert np.allclose(endpoint, target.blocks[0], atol=1e-6)


def test_multi_learner_verdict_and_fields():
    game = sf.make_builtin("brockett")
    bundle = sf.RegularizerBundle(game, "neg_entropy")
    report = sf.multi_player_verdict(game, bundle, num_points=25)
    assert report["verdict"] == "sufficient_condition_met"
    assert report["theorem"] == 2
    assert report["lie"]["min_rank"] == 3

    fields = sf.eta_fields(game, bundle, game.uniform_profile())
    assert len(fields["controls"]) == 2
    assert fields["drift"].shape == (6,)
    lam = 2 * 0.5 * 0.5
    assert fields["controls"][0][0] == pytest.approx(lam)


def test_mixed_regularizers_round_trip():
    game = sf.make_builtin("brockett")
    bundle = sf.RegularizerBundle(game, ["neg_entropy", "squared_norm", "neg_entropy"])
    assert bundle.kinds == ["neg_entropy", "squared_norm", "neg_entropy"]
    x = sf.StrategyProfile([np.array([0.3, 0.7]), np.array([0.6, 0.4]),
                            np.array([0.5, 0.5])])
    z = bundle.mirror_inverse(x)
    back = bundle.choice(z)
    assert np.allclose(back.flatten(), x.flatten(), atol=1e-12)


def test_attainable_cloud_and_coverage():
    game = sf.make_builtin("rps", [0.0])
    bundle = sf.RegularizerBundle(game, "neg_entropy")
    starts = [game.uniform_profile()]
    cloud = sf.attainable_cloud(game, bundle, starts, density=6, horizon=2.0,
                                horizon_count=4, dt=1e-2)
    assert cloud.num_points == 28 * 4
    assert cloud.guard_skipped == 0
    mat = cloud.to_matrix()
    assert mat.shape == (cloud.num_points, 4 + game.total_actions)
    assert sf.coverage(cloud, 5) > 0.0
    assert len(sf.simplex_lattice(6, 3)) == 28


def test_spec_parsing():
    text = """
[game]
builtin: rps
epsilon: 0.25

[learners]
regularizer: squared_norm

[analysis]
seed: 7
"""
    game, bundle, defaults = sf.parse_spec_text(text)
    assert game.name == "rps"
    assert bundle.kinds == ["squared_norm"]
    assert defaults["seed"] == 7
    assert defaults["dt"] == pytest.approx(1e-3)

    with pytest.raises(sf.SpecParseError):
        sf.parse_spec_text("[learners]\nregularizer: neg_entropy\n")


DECOUPLED_SPEC = """
[game]
name: decoupled
learner_actions: 2 2
controller_actions: 3
shape_1: 2 3 2
payoff_1: [[[1,1],[-1,-1],[0,0]],[[-1,-1],[1,1],[0,0]]]
shape_2: 2 3 2
payoff_2: [[[0,0],[1,1],[-1,-1]],[[0,0],[-1,-1],[1,1]]]

[learners]
regularizer: neg_entropy
"""


def test_greedy_steering_short_hop():
    game, bundle, _ = sf.parse_spec_text(DECOUPLED_SPEC)
    assert game.num_learners == 2
    x0 = game.uniform_profile()
    target = sf.StrategyProfile([np.array([0.6, 0.4]), np.array([0.4, 0.6])])
    plan = sf.greedy_steer_multi(game, bundle, x0, target, segment_duration=0.1,
                                 lattice_density=10, max_segments=80)
    assert plan.method == "greedy_receding_horizon"
    assert plan.reached
    assert plan.achieved_distance < 1e-2
    traj = sf.simulate(game, bundle, x0, plan.schedule, dt=1e-3,
                       record_every=10 ** 9)
    endpoint = traj["primal"][-1]
    assert np.max(np.abs(endpoint - target.flatten())) < 5e-2
    assert np.max(np.abs(endpoint - plan.predicted_endpoint.flatten())) < 1e-6


def test_rank_helpers():
    a = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
    rank, singulars = sf.projected_rank(a)
    assert rank == 2
    assert singulars.shape == (3,)
    cert = sf.neutralizer_lp(a)
    assert cert is not None
    assert np.allclose(cert["u0"], np.ones(3) / 3, atol=1e-9)
    assert cert["interiority"] == pytest.approx(1 / 3, abs=1e-9)
    assert sf.uniform_neutralizer(sf.make_builtin("regulated_matching_pennies")) is None

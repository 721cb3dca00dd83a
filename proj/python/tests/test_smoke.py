import json
import math

import numpy as np
import pytest

import regime_sde as rs


def test_explosion_finite_schedule():
    s = rs.build_schedule(rs.explosion(finite=True, count=200))
    bps = s.breakpoints
    assert len(bps) == 201
    assert max(abs(bps[n] - n / (n + 1)) for n in range(1, 201)) < 1e-8
    assert s.status == "FiniteTmax"
    assert abs(s.tmax_estimate - 1.0) < 1e-3


def test_explosion_global_schedule():
    s = rs.build_schedule(rs.explosion(finite=False, count=20))
    assert [round(t, 9) for t in s.breakpoints] == list(range(21))
    assert s.status != "FiniteTmax"


def test_transform_round_trip():
    p = rs.linear()
    for x in (1e-6, 0.3, 1.0, 17.0):
        assert abs(p.inverse(0.7, p.forward(0.7, x)) - x) <= 1e-12 * max(1.0, x)


def test_assumptions_and_json_round_trip():
    p = rs.gaussian()
    assert all(passed for _, passed, _ in rs.check_assumptions(p))
    q = rs.Problem.from_json(p.to_json())
    assert json.loads(q.to_json()) == json.loads(p.to_json())
    doc = json.loads(p.to_json())
    doc["initial_law"]["mu0_bar"] = 1.0
    bad = rs.Problem.from_json(json.dumps(doc))
    checks = {name: passed for name, passed, _ in rs.check_assumptions(bad)}
    assert checks["As-x0"] is False
    with pytest.raises(ValueError):
        rs.Problem.from_json("{}")


def test_exact_sampler_matches_phi():
    p = rs.gaussian()
    s = rs.build_schedule(p)
    times = [0.5, 1.0, 2.0]
    a = rs.simulate_exact(s, p, 50000, times, seed=11)
    b = rs.simulate_exact(s, p, 50000, times, seed=11)
    assert a.shape == (3, 50000)
    assert np.array_equal(a, b)
    for i, t in enumerate(times):
        phi = s.phi(t)
        assert abs(np.mean(a[i] <= 0.0) - phi) <= 4 * math.sqrt(phi * (1 - phi) / 50000)


def test_particles_single_particle():
    out = rs.simulate_particles(rs.gaussian(), n=1, dt=0.01, T=0.1)
    assert set(out["phi_hat"]) <= {0.0, 1.0}


def test_pathologies():
    assert rs.classify_level(rs.two_solutions()) == "TwoSolutions"
    assert rs.classify_level(rs.no_local_solution()) == "NoLocalSolution"
    assert rs.classify_level(rs.infinitely_many()) == "InfinitelyMany"
    assert rs.classify_level(rs.LevelProblem.from_problem(rs.oscillation())) == "NoLocalSolution"
    p1, p2 = rs.branch_phi(rs.two_solutions(), 1.0)
    assert abs(p1 - 0.395441161) < 1e-6 and abs(p2 - 0.604558839) < 1e-6
    assert abs(p1 + p2 - 1.0) < 1e-12
    assert rs.delay_phi(rs.infinitely_many(), 1.0, 1.0) == 0.5
    flips, _, _ = rs.oscillation_flips(rs.LevelProblem.from_problem(rs.oscillation()), steps=500, n=4000)
    assert flips >= 50
    with pytest.raises(RuntimeError):
        rs.branch_phi(rs.no_local_solution(), 1.0)

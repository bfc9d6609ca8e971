import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from scipy.integrate import simpson

from mintraj import (
    NormalizedProblem as NP,
    TimeOutOfRange,
    energy,
    evaluate,
    plan,
    sample,
    validate,
)
from mintraj import trajectory
from instances import EXAMPLES, example, problems


def test_eval_unconstrained_midpoint():
    p = plan(example("unconstrained"))
    assert evaluate(p, 0.5) == pytest.approx((1.5, 1.125, 0.3125), abs=1e-15)


def test_eval_bang_affine_coast_at_coast_junction():
    p = plan(example("bang_affine_coast"))
    u, v, pos = evaluate(p, p.tau_s)
    assert u == pytest.approx(0.0, abs=1e-15)
    assert v == pytest.approx(1.0, abs=1e-15)
    assert pos == pytest.approx(2.7 - (3.0 - p.tau_s), abs=1e-14)
    assert pos == pytest.approx(0.58730, abs=1e-5)


@pytest.mark.parametrize("name", list(EXAMPLES))
def test_eval_at_start_is_entry_state(name):
    np_ = example(name)
    p = plan(np_)
    u, v, pos = evaluate(p, 0.0)
    assert (u, v, pos) == (p.arcs[0].intercept, np_.v0, 0.0)


def test_eval_array_matches_scalar():
    p = plan(example("bang_affine_coast"))
    t = np.linspace(0.0, 3.0, 37)
    u, v, pos = evaluate(p, t)
    for k in (0, 5, 17, 36):
        assert (u[k], v[k], pos[k]) == evaluate(p, float(t[k]))


@pytest.mark.parametrize("t", [-1e-9, 3.0 + 1e-9, math.nan])
def test_eval_out_of_range(t):
    p = plan(example("bang_affine_coast"))
    with pytest.raises(TimeOutOfRange):
        evaluate(p, t)


def test_junction_belongs_to_following_arc():
    p = plan(example("bang_affine"))
    # make the affine arc start at a different control level to observe the tie-break
    arcs = (p.arcs[0], dataclasses.replace(p.arcs[1], intercept=0.25))
    q = dataclasses.replace(p, arcs=arcs)
    assert evaluate(q, p.tau_c)[0] == 0.25


def test_eval_alias():
    assert trajectory.eval is evaluate


@pytest.mark.parametrize(
    "np_, expected",
    [(example("unconstrained"), 3.0), (example("bang"), 4.0), (NP(1, 2, 2, 1, 3), 0.0)],
)
def test_energy_examples(np_, expected):
    assert energy(plan(np_)) == pytest.approx(expected, rel=1e-15, abs=1e-15)


def test_sample_endpoints_and_junctions():
    p = plan(example("bang_affine_coast"))
    pts = sample(p, 2)
    assert [pt.t for pt in pts] == [0.0, p.tau_c, p.tau_s, 3.0]
    assert len(sample(p, 5)) == 7


def test_sample_deduplicates_grid_junctions():
    p = plan(example("affine_coast"))
    ts = [pt.t for pt in sample(p, 5)]
    assert ts == [0.0, 0.5, 1.0, 1.5, 2.0]


def test_sample_needs_two_points():
    with pytest.raises(ValueError):
        sample(plan(example("bang")), 1)


@pytest.mark.parametrize("name", list(EXAMPLES))
def test_validate_constructed_plans(name):
    np_ = example(name)
    d = validate(plan(np_), np_)
    assert d.ok
    assert max(d.max_control_violation, d.max_speed_violation, d.terminal_position_error,
               d.junction_discontinuity) <= 1e-9


def test_validate_flags_corrupted_plan():
    np_ = example("bang_affine_coast")
    p = plan(np_)
    arcs = list(p.arcs)
    arcs[1] = dataclasses.replace(arcs[1], intercept=arcs[1].intercept + 0.1)
    d = validate(dataclasses.replace(p, arcs=tuple(arcs)), np_)
    assert d.terminal_position_error > 0.0 or d.junction_discontinuity > 0.0
    assert d.max_control_violation == pytest.approx(0.1, abs=1e-12)
    assert not d.ok


def test_validate_bang_terminal_control():
    np_ = example("bang")
    d = validate(plan(np_), np_)
    assert d.terminal_control == 2.0 and d.terminal_control_expected and d.ok


def test_validate_rejects_unknown_problem_type():
    with pytest.raises(TypeError):
        validate(plan(example("bang")), object())


def test_junction_gaps_zero_for_constructed_plan():
    gaps = trajectory.junction_gaps(plan(example("bang_affine_coast")))
    assert len(gaps) == 2 and max(max(g) for g in gaps) <= 1e-15


def _interior_times(p, n=400, margin=1e-4):
    out = []
    for a in p.arcs:
        if a.duration > 4 * margin:
            out.append(np.linspace(a.t_start + margin, a.t_end - margin, n))
    return np.concatenate(out)


@given(problems())
def test_finite_differences_reproduce_derivatives(np_):
    p = plan(np_)
    t = _interior_times(p, n=50, margin=2e-5)
    if t.size == 0:
        return
    h = 1e-5
    u, v, _ = evaluate(p, t)
    _, v_plus, p_plus = evaluate(p, t + h)
    _, v_minus, p_minus = evaluate(p, t - h)
    scale = max(1.0, np_.v_max, np_.L)
    assert np.max(np.abs((v_plus - v_minus) / (2 * h) - u)) <= 1e-6 * scale
    assert np.max(np.abs((p_plus - p_minus) / (2 * h) - v)) <= 1e-6 * scale


@given(problems())
def test_energy_matches_simpson(np_):
    p = plan(np_)
    total = 0.0
    for a in p.arcs:
        t = np.linspace(a.t_start, a.t_end, 10_001)
        u, _, _ = a.state(t)
        total += simpson(u * u, x=t)
    assert energy(p) == pytest.approx(total, rel=1e-10, abs=1e-300)

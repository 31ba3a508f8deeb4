"""Chain specification, profiles and the trajectory simulator."""

import numpy as np
import pytest

from stablike import (
    ChainSpec,
    DomainError,
    ProfileFn,
    SasJump,
    make_chain,
    simulate,
    step,
)
from stablike.chain import alpha_at, delta_at, gamma_at


def test_constant_profile():
    p = ProfileFn.constant(1.5)
    for x in (-1e6, -1.0, 0.0, 2.5, 1e6):
        assert p(x) == 1.5
    assert p.values == (1.5,)


def test_two_valued_profile_splits_at_origin():
    p = ProfileFn.two_valued(1.2, 1.0)
    assert p(-1e-12) == 1.2
    assert p(-50.0) == 1.2
    assert p(0.0) == 1.0  # x >= 0 takes the right value
    assert p(50.0) == 1.0


def test_periodic_profile_wraps():
    p = ProfileFn.periodic(2.0, [1.1, 1.9])
    assert p(0.1) == 1.1
    assert p(1.5) == 1.9
    assert p(2.1) == 1.1
    assert p(-0.5) == p(-0.5 + 2.0)


def test_piecewise_profile_breakpoints():
    p = ProfileFn.piecewise([-1.0, 1.0], [0.5, 1.0, 1.5])
    assert p(-5.0) == 0.5
    assert p(0.0) == 1.0
    assert p(1.0) == 1.5
    assert p(7.0) == 1.5


def test_custom_profile_callable():
    p = ProfileFn.custom(lambda x: 1.0 + 0.5 / (1.0 + x * x))
    assert p(0.0) == pytest.approx(1.5)
    assert p(1e9) == pytest.approx(1.0)


def test_make_chain_accepts_numbers():
    spec = make_chain(1.5, gamma=2.0, delta=-0.25)
    assert alpha_at(spec, 3.0) == 1.5
    assert gamma_at(spec, -3.0) == 2.0
    assert delta_at(spec, 0.0) == -0.25


def test_spec_validates_alpha_range():
    with pytest.raises(DomainError):
        make_chain(2.5)
    with pytest.raises(DomainError):
        ChainSpec(
            alpha_profile=ProfileFn.two_valued(1.2, 0.0),
            family=SasJump(
                gamma_profile=ProfileFn.constant(1.0),
                delta_profile=ProfileFn.constant(0.0),
            ),
        )


def test_spec_validates_gamma_positive():
    with pytest.raises(DomainError):
        make_chain(1.5, gamma=0.0)


def test_unchecked_skips_validation():
    spec = ChainSpec(
        alpha_profile=ProfileFn.constant(2.0),  # boundary value, normally rejected
        family=SasJump(
            gamma_profile=ProfileFn.constant(1.0),
            delta_profile=ProfileFn.constant(0.0),
        ),
        unchecked=True,
    )
    assert alpha_at(spec, 0.0) == 2.0


def test_simulate_replay_and_shape(sas15):
    a = simulate(sas15, x0=3.0, n_steps=200, seed=99)
    b = simulate(sas15, x0=3.0, n_steps=200, seed=99)
    assert a.start == 3.0 and a.seed == 99
    assert len(a.states) == 200  # states exclude the starting point
    assert np.array_equal(a.states, b.states)
    c = simulate(sas15, x0=3.0, n_steps=200, seed=100)
    assert not np.array_equal(a.states, c.states)


def test_simulate_prefix_property(sas15):
    # a longer run with the same seed extends the shorter one
    short = simulate(sas15, x0=0.0, n_steps=50, seed=7)
    long = simulate(sas15, x0=0.0, n_steps=300, seed=7)
    assert np.array_equal(long.states[:50], short.states)


def test_simulate_state_dependence():
    # two-valued drift pulls toward the origin from both sides
    spec = ChainSpec(
        alpha_profile=ProfileFn.constant(1.8),
        family=SasJump(
            gamma_profile=ProfileFn.constant(0.01),
            delta_profile=ProfileFn.two_valued(1.0, -1.0),
        ),
    )
    traj = simulate(spec, x0=500.0, n_steps=2000, seed=5)
    # with tiny jump scale the path marches down by ~1 per step
    assert traj.states[400] < 150.0
    assert np.all(np.abs(traj.states[900:]) < 50.0)


def test_step_matches_simulate_first_state(sas15):
    from numpy.random import SeedSequence, default_rng

    traj = simulate(sas15, x0=2.0, n_steps=1, seed=13)
    manual = step(sas15, 2.0, default_rng(SeedSequence(13)))
    assert traj.states[0] == manual


def test_step_moves_by_shift_plus_scaled_jump():
    spec = make_chain(1.0, gamma=2.0, delta=10.0)
    base = make_chain(1.0, gamma=2.0, delta=0.0)
    from numpy.random import default_rng

    got = step(spec, 1.0, default_rng(3))
    plain = step(base, 1.0, default_rng(3))
    assert got == pytest.approx(plain + 10.0, abs=1e-12)


def test_simulate_rejects_bad_lengths(sas15):
    with pytest.raises(DomainError):
        simulate(sas15, x0=0.0, n_steps=0, seed=1)

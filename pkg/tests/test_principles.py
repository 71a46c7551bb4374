"""Maximum principles, quasi-symmetry and quasimetric structure.

The 2x2 oracles are worked out by hand.  For ``[[1, t], [t, 1]]`` with
``t > 1``: put unit mass at point 0; its potential is 1 at 0 and ``t``
at 1, so the one-sided maximum-principle constant is exactly ``t``.  For
the complete comparison the best reply measure sits at point 1, giving
``max t mu : mu <= nu_0 + t nu_1 + c, t nu_0 + nu_1 + c = 1`` whose value
is ``t^2``.
"""

import numpy as np
import pytest

from potbench import (
    Kernel,
    Space,
    complete_mp_constant,
    modifier,
    modify_kernel,
    quasimetric_constant,
    wmp_constant,
)
from conftest import metric_power_kernel, rand_gram_kernel


def two_by_two(t):
    return Kernel(Space.of_size(2), [[1.0, t], [t, 1.0]])


def test_wmp_oracle_2x2():
    rep = wmp_constant(two_by_two(2.0))
    assert rep.constant == pytest.approx(2.0, abs=1e-9)
    assert rep.holds
    assert rep.mode == "exact"
    assert rep.pairs_checked > 0

    # diagonal domination keeps the constant at its floor
    assert wmp_constant(two_by_two(0.5)).constant == 1.0
    assert wmp_constant(Kernel(Space.of_size(2), np.eye(2))).constant == 1.0


def test_wmp_zero_diagonal_blows_up():
    rep = wmp_constant(Kernel(Space.of_size(2), [[0.0, 1.0], [1.0, 0.0]]))
    assert rep.constant == np.inf
    assert not rep.holds


def test_wmp_sampled_mode_is_deterministic():
    rng = np.random.default_rng(3)
    k = Kernel(Space.of_size(9), rng.uniform(0.5, 2.0, (9, 9)))
    a = wmp_constant(k, budget=64, seed=11)
    b = wmp_constant(k, budget=64, seed=11)
    assert a.mode == "sampled"
    assert a.constant == b.constant
    # sampling can only miss violating pairs, never invent them
    full = wmp_constant(k)
    assert full.mode == "exact"
    assert a.constant <= full.constant + 1e-12


def test_complete_mp_oracle_2x2():
    rep = complete_mp_constant(two_by_two(2.0))
    assert rep.constant == pytest.approx(4.0, abs=1e-9)
    assert rep.holds
    assert complete_mp_constant(two_by_two(0.5)).constant == pytest.approx(1.0, abs=1e-9)


def test_complete_dominates_onesided():
    rng = np.random.default_rng(5)
    for _ in range(10):
        k = Kernel(Space.of_size(4), rng.uniform(0.3, 2.0, (4, 4)))
        h1 = wmp_constant(k).constant
        h2 = complete_mp_constant(k).constant
        # the complete comparison quantifies over more adversaries
        assert h2 >= h1 - 1e-9


def test_quasimetric_oracles():
    s2 = Space.of_size(2)
    rep = quasimetric_constant(Kernel(s2, [[np.inf, 1.0], [1.0, np.inf]]))
    assert rep.kappa == 1.0 and rep.is_quasimetric

    # reciprocal of a genuine metric with a stretched pair
    d = np.array([[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]])
    with np.errstate(divide="ignore"):
        g = np.where(d > 0, 1.0 / d, np.inf)
    rep3 = quasimetric_constant(Kernel(Space.of_size(3), g))
    assert rep3.kappa == pytest.approx(1.5, abs=1e-12)

    # vanishing self-distance makes the degenerate triple (x, x, y) tight
    ones = np.full((3, 3), 1.0)
    np.fill_diagonal(ones, np.inf)
    eq = quasimetric_constant(Kernel(Space.of_size(3), ones))
    assert eq.kappa == 1.0
    assert eq.ptolemy_ok
    assert eq.ptolemy_bound == pytest.approx(4.0)

    # a positive self-distance halves the (x, x, x) ratio instead
    flat = quasimetric_constant(Kernel(Space.of_size(2), np.full((2, 2), 1.0)))
    assert flat.kappa == 0.5


def test_quasimetric_collinear_powers():
    # three collinear points, inverse distance: a metric, constant one;
    # squaring the distance stretches the middle triple to 4 / (1 + 1)
    pts = np.array([0.0, 1.0, 2.0])
    dist = np.abs(pts[:, None] - pts[None, :])
    with np.errstate(divide="ignore"):
        inv = np.where(dist > 0, 1.0 / dist, np.inf)
        inv2 = np.where(dist > 0, 1.0 / dist**2, np.inf)
    assert quasimetric_constant(Kernel(Space.of_size(3), inv)).kappa == 1.0
    assert quasimetric_constant(Kernel(Space.of_size(3), inv2)).kappa == 2.0


def test_quasimetric_rejects_asymmetric_and_zero():
    rep = quasimetric_constant(Kernel(Space.of_size(2), [[1.0, 2.0], [0.5, 1.0]]))
    assert not rep.is_quasimetric

    # a zero kernel entry is an infinite distance; with a finite detour
    # on the right side the constant blows up
    g = np.array([[np.inf, 0.0, 1.0], [0.0, np.inf, 1.0], [1.0, 1.0, np.inf]])
    rep2 = quasimetric_constant(Kernel(Space.of_size(3), g))
    assert rep2.kappa == np.inf
    assert not rep2.is_quasimetric


def test_quasimetric_on_metric_power_kernels():
    # 1/(d + c)^p over a shortest-path metric: p = 1 keeps kappa at 1,
    # larger p dilates triangles by at most 2^(p-1)
    rng = np.random.default_rng(2)
    for p in (1.0, 2.0):
        k = metric_power_kernel(rng, 6, power=p, offset=0.3)
        rep = quasimetric_constant(k)
        assert rep.is_quasimetric
        assert rep.kappa <= 2.0 ** (p - 1.0) + 1e-9
        wmp = wmp_constant(k)
        assert wmp.holds
        assert wmp.constant <= 2.0 * rep.kappa + 1e-9


def test_modifier_and_modified_kernel():
    s = Space.of_size(3)
    k = Kernel(s, [[0.5, 0.25, 0.0], [0.25, 0.5, 1.0], [0.0, 1.0, 2.0]])
    g = modifier(k, 0)
    assert g.tolist() == [0.5, 0.25, 0.0]
    mod = modify_kernel(k, g)
    # the zero column drops its point from the retained set
    assert list(mod.retained) == [0, 1]
    expect = np.array([[2.0, 2.0], [2.0, 8.0]])
    assert np.allclose(mod.kernel.entries, expect)
    assert mod.weights.tolist() == [0.5, 0.25, 0.0]


def test_modified_kernel_keeps_wmp_of_complete_kernels():
    # dividing out a bounded modifier preserves the complete constant as a
    # one-sided bound for the new kernel
    rng = np.random.default_rng(4)
    for _ in range(5):
        k = rand_gram_kernel(rng, 5)
        ents = k.entries + 0.05  # keep it strictly positive
        k = Kernel(k.space, ents)
        h = complete_mp_constant(k).constant
        if not np.isfinite(h):
            continue
        g = modifier(k, 0)
        mod = modify_kernel(k, g)
        got = wmp_constant(mod.kernel).constant
        assert got <= h * (1.0 + 1e-9)

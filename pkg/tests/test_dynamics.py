import math
import warnings

import numpy as np
import pytest

from moeblab import cocycle as cc
from moeblab import contfrac as cf
from moeblab import dynamics as dy
from moeblab.errors import ConjugacyError, DomainError

SKEW_DESC = {"kind": "skew2", "alpha": "sqrt2-1", "h": [[1, 0.0, -0.15]]}


def ks_statistic(sample_a: np.ndarray, sample_b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    a = np.sort(sample_a)
    b = np.sort(sample_b)
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / len(a)
    cdf_b = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(cdf_a - cdf_b)))


def ks_critical(n: int, m: int, level_coeff: float = 1.628) -> float:
    # c(0.01) = 1.628 for the two-sample test
    return level_coeff * math.sqrt((n + m) / (n * m))


@pytest.fixture(scope="module")
def systems():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return {
            "rotation": dy.make_system({"kind": "rotation", "alpha": "sqrt2-1"}),
            "skew2": dy.make_system(SKEW_DESC),
            "group": dy.make_system({"kind": "group_skew", "group": {"q": 12},
                                     "a": 5, "h": [[1, 0.05, 0.0]]}),
            "shift": dy.make_system({"kind": "shift", "weights": [0.5, 0.5],
                                     "horizon": 48}),
        }


# ---------------------------------------------------------------------------
# Construction and stepping
# ---------------------------------------------------------------------------

def test_unknown_kind():
    with pytest.raises(DomainError, match="unknown system kind"):
        dy.make_system({"kind": "horocycle"})


def test_missing_field_named():
    with pytest.raises(DomainError, match="'alpha'"):
        dy.make_system({"kind": "rotation"})
    with pytest.raises(DomainError, match="'weights'"):
        dy.make_system({"kind": "shift"})


def test_identity_rotation():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ident = dy.make_system({"kind": "rotation", "alpha": "0"})
    assert ident.step(0.37) == 0.37
    assert ident.rational_alpha_warning


def test_rational_alpha_warns():
    with pytest.warns(UserWarning, match="rational"):
        sys_ = dy.make_system({"kind": "rotation", "alpha": "1/3"})
    assert sys_.rational_alpha_warning


def test_rotation_metric_invariance(systems):
    rot = systems["rotation"]
    for x, y in [(0.12, 0.7), (0.98, 0.01), (0.5, 0.5)]:
        assert rot.metric(rot.step(x), rot.step(y)) == pytest.approx(
            rot.metric(x, y), abs=1e-15)


def test_skew_step_matches_formula(systems):
    skew = systems["skew2"]
    a = skew.alpha.as_float()
    s = skew.step(np.array([0.25, 0.5]))
    assert s[0] == pytest.approx((0.25 + a) % 1)
    assert s[1] == pytest.approx((0.5 + 0.3 * math.sin(2 * np.pi * 0.25)) % 1)


def test_skew_power_formula(systems):
    # S^n(x, y) = (x + n alpha, y + H_n(x)), checked against n-fold stepping
    skew = systems["skew2"]
    a = skew.alpha.as_float()
    state = np.array([0.1, 0.2])
    x0 = state.copy()
    for n in range(1, 101):
        state = skew.step(state)
    h_n = cc.birkhoff_sum(skew.h, skew.alpha, float(x0[0]), 100)
    assert state[0] == pytest.approx((x0[0] + 100 * a) % 1, abs=1e-10)
    assert dy.circle_dist(state[1], (x0[1] + h_n) % 1.0) < 1e-10


def test_iteration_identity_long(systems):
    # pointwise to 1e-10 for n <= 1000
    skew = systems["skew2"]
    state = np.array([0.32, 0.77])
    x0, y0 = state
    for n in (10, 100, 1000):
        s = np.array([x0, y0])
        for _ in range(n):
            s = skew.step(s)
        h_n = cc.birkhoff_sum(skew.h, skew.alpha, x0, n)
        assert dy.circle_dist(s[1], (y0 + h_n) % 1.0) < 1e-10


def test_bulk_step_agrees_with_scalar(systems):
    for name, sys_ in systems.items():
        states = sys_.sample(17, seed=5)
        bulk_next = sys_.step_bulk(states)
        for s, t in zip(sys_.states_list(states), sys_.states_list(bulk_next)):
            assert sys_.metric(sys_.step(s), t) < 1e-12, name


# ---------------------------------------------------------------------------
# Metric axioms
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["rotation", "skew2", "group", "shift"])
def test_metric_axioms(name, systems, rng):
    sys_ = systems[name]
    states = sys_.states_list(sys_.sample(30, seed=11))
    for _ in range(1000):
        i, j, k = rng.integers(0, len(states), 3)
        x, y, z = states[i], states[j], states[k]
        dxy = sys_.metric(x, y)
        assert dxy == pytest.approx(sys_.metric(y, x), abs=1e-12)
        assert sys_.metric(x, x) <= 1e-12
        assert dxy <= sys_.metric(x, z) + sys_.metric(z, y) + 1e-12


def test_pairwise_matches_scalar_metric(systems):
    for name, sys_ in systems.items():
        states = sys_.sample(12, seed=3)
        mat = sys_.pairwise_distance(states)
        lst = sys_.states_list(states)
        for i in range(12):
            for j in range(12):
                assert mat[i, j] == pytest.approx(
                    sys_.metric(lst[i], lst[j]), abs=1e-12), name


# ---------------------------------------------------------------------------
# Sampler invariance
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name,coord", [("rotation", None), ("skew2", 0),
                                        ("skew2", 1)])
def test_sampler_invariance_ks(name, coord, systems):
    sys_ = systems[name]
    states = sys_.sample(10 ** 4, seed=77)
    stepped = sys_.step_bulk(states)
    arr = np.asarray(states)
    arr2 = np.asarray(stepped)
    if coord is not None:
        arr, arr2 = arr[:, coord], arr2[:, coord]
    stat = ks_statistic(arr, arr2)
    assert stat < ks_critical(len(arr), len(arr2))


def test_skew_x_marginal_uniform(systems):
    states = systems["skew2"].sample(10 ** 4, seed=13)
    xs = np.sort(np.asarray(states)[:, 0])
    uniform_cdf = xs                           # CDF of U[0,1) at sorted points
    empirical = np.arange(1, len(xs) + 1) / len(xs)
    stat = float(np.max(np.abs(empirical - uniform_cdf)))
    assert stat < 1.628 / math.sqrt(len(xs))   # one-sample 1% critical value


def test_bernoulli_marginals(systems):
    mat, pos = systems["shift"].sample(10 ** 4, seed=21)
    freq = mat.mean(axis=0)
    sigma = math.sqrt(0.25 / mat.shape[0])
    assert np.all(np.abs(freq - 0.5) < 3 * sigma + 1e-9)


def test_group_skew_circle_alias():
    gs = dy.make_system({"kind": "group_skew", "group": "circle",
                         "alpha": "sqrt2-1", "h": [[1, 0.0, -0.15]]})
    assert gs.kind == "group_skew"
    a = gs.alpha.as_float()
    s = gs.step(np.array([0.25, 0.5]))
    assert s[0] == pytest.approx((0.25 + a) % 1)


def test_orbit_sampler_provenance():
    desc = dict(SKEW_DESC, sampler="orbit", x0=[0.1, 0.2],
                burn_in=100, stride=3)
    sys_ = dy.make_system(desc)
    states = sys_.sample(50, seed=0)
    assert np.asarray(states).shape == (50, 2)


# ---------------------------------------------------------------------------
# Function-family metric
# ---------------------------------------------------------------------------

def test_family_metric_basics():
    fam = dy.function_family_metric([lambda x: math.cos(2 * math.pi * x)])
    assert fam(0.3, 0.3) == 0.0
    assert fam(0.0, 0.5) <= 1.0
    assert fam.truncation_slack == 0.5


def test_family_metric_direct_series():
    fns = [(lambda x, l=l: math.cos(2 * math.pi * l * x)) for l in range(1, 21)]
    fam = dy.function_family_metric(fns, l_max=20)
    x, y = 0.0, 0.5
    expected = sum(abs(math.cos(0) - math.cos(math.pi * l)) / (2 ** l * 3)
                   for l in range(1, 21))
    assert fam(x, y) == pytest.approx(expected, abs=1e-9)
    assert all(abs(nrm - 1.0) < 1e-6 for nrm in fam.norms)


def test_family_metric_bound():
    fns = [(lambda x, l=l: math.sin(2 * math.pi * l * x)) for l in range(1, 6)]
    fam = dy.function_family_metric(fns)
    for x, y in [(0.1, 0.9), (0.25, 0.75)]:
        assert fam(x, y) <= 1.0


# ---------------------------------------------------------------------------
# Conjugation
# ---------------------------------------------------------------------------

def _coboundary_skew(phi_amp=0.2):
    alpha = cf.SQRT2_MINUS_1
    a = alpha.as_float()
    # h = phi(. + alpha) - phi with phi = amp * sin(2 pi x):
    # hhat(1) = phihat(1) (e(alpha) - 1), phihat(1) = -i amp / 2
    phase = np.exp(2j * np.pi * a) - 1.0
    c1 = (-0.5j * phi_amp) * phase
    h = [[1, c1.real, c1.imag]]
    return dy.make_system({"kind": "skew2", "alpha": "sqrt2-1", "h": h}), phi_amp


def _pi_pair(phi_amp):
    def phi(x):
        return phi_amp * np.sin(2 * np.pi * x)

    def pi(states):
        arr = np.asarray(states)
        return np.column_stack([arr[:, 0], np.mod(arr[:, 1] - phi(arr[:, 0]), 1.0)])

    def pi_inv(states):
        arr = np.asarray(states)
        return np.column_stack([arr[:, 0], np.mod(arr[:, 1] + phi(arr[:, 0]), 1.0)])

    return pi, pi_inv


def test_conjugate_identity(systems):
    skew = systems["skew2"]
    ident = lambda s: np.asarray(s)
    conj = dy.conjugate_system(skew, ident, ident)
    states = skew.sample(1000, seed=8)
    a = skew.step_bulk(states)
    b = conj.step_bulk(states)
    lst = skew.states_list
    assert max(skew.metric(x, y) for x, y in zip(lst(a), lst(b))) < 1e-12


def test_conjugate_coboundary_gives_rotation():
    skew, amp = _coboundary_skew()
    pi, pi_inv = _pi_pair(amp)
    conj = dy.conjugate_system(skew, pi, pi_inv)
    states = skew.sample(1000, seed=4)
    stepped = conj.step_bulk(states)
    arr = np.asarray(states)
    out = np.asarray(stepped)
    a = skew.alpha.as_float()
    assert np.max(dy.circle_dist(out[:, 0], (arr[:, 0] + a) % 1)) < 1e-9
    assert np.max(dy.circle_dist(out[:, 1], arr[:, 1])) < 1e-9   # y frozen


def test_conjugacy_error_on_bad_inverse():
    skew, amp = _coboundary_skew()
    pi, _ = _pi_pair(amp)
    bad_inv = lambda s: np.asarray(s)    # not the inverse
    with pytest.raises(ConjugacyError):
        dy.conjugate_system(skew, pi, bad_inv)


def test_xi_to_one_factor_intertwines():
    # pi_xi(x, y) = (x, xi y) intertwines T_h with T_{xi h}, xi = 2
    xi = 2
    base = dy.make_system(SKEW_DESC)
    scaled = dy.make_system({"kind": "skew2", "alpha": "sqrt2-1",
                             "h": [[1, 0.0, -0.15 * xi]]})

    def pi_xi(states):
        arr = np.asarray(states)
        return np.column_stack([arr[:, 0], np.mod(xi * arr[:, 1], 1.0)])

    resid = dy.factor_map_residual(base, scaled, pi_xi, 1000, seed=2)
    assert resid < 1e-9

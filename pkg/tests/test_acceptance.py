"""Acceptance suite: sixteen criteria at their stated tolerances.

Each criterion is a function that raises ``AssertionError`` on failure and
returns a one-line summary of the measured quantities. Under pytest every
criterion is one test and the PASS/FAIL lines are printed in the terminal
summary (see ``conftest.py``); ``python3 tests/test_acceptance.py`` prints
the same lines directly.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import optimize
from scipy.special import betaln, exp1
from scipy.stats import binom

sys.path.insert(0, str(Path(__file__).parent))

from artifact import asymptotics as asy  # noqa: E402
from artifact import expectations as ex  # noqa: E402
from artifact import tce  # noqa: E402
from artifact.exponents import (  # noqa: E402
    DualParams,
    correct_decoding_exponent,
    dual_rc_bound,
    dual_rc_optimize,
    log_ensemble_error_probability_exact,
    rc_exponent,
    rc_exponent_mmi,
    rc_grid_curve,
    sp_exponent,
    sw_binning_exponent,
    sw_grid_curve,
)
from artifact.types_core import binary_entropy, binary_kl  # noqa: E402
from oracles import (  # noqa: E402
    binary_divergence,
    bsc_gv_bisection,
    legendre_grid,
    random_channels,
    rate_grid,
    uniform_mi,
)

RESULTS: dict[int, tuple[str, str]] = {}

BSC = np.array([[0.9, 0.1], [0.1, 0.9]])
U2 = np.array([0.5, 0.5])
U3 = np.full(3, 1.0 / 3.0)


def _channels_2x3():
    return [BSC] + random_channels(5, 2, 3, seed=2024)


# -- asymptotics ------------------------------------------------------------------


def criterion_1():
    r100 = asy.binomial_count_saddle(100, 50).estimate / math.comb(100, 50)
    r20 = asy.binomial_count_saddle(20, 10).estimate / math.comb(20, 10)
    assert 0.99 <= r100 <= 1.01, r100
    assert 0.987 <= r20 <= 1.013, r20
    return f"ratio(100,50)={r100:.6f} ratio(20,10)={r20:.6f}"


def criterion_2():
    r10 = math.exp(asy.stirling(10)[1] - math.lgamma(11))
    r100 = math.exp(asy.stirling(100)[1] - math.lgamma(101))
    assert 0.99 <= r10 <= 1.0, r10
    assert abs(r100 - 1) <= 1 / 1200 + 1e-4, r100
    return f"ratio(10)={r10:.6f} ratio(100)={r100:.8f}"


def criterion_3():
    worst = 0.0
    for s in (0.5, 1.0, 2.0):
        exact, saddle = asy.hypersphere_surface(100, s)
        worst = max(worst, abs(saddle - exact) / 100)
    assert worst <= 2e-4, worst
    return f"max |saddle-exact|/n = {worst:.2e}"


def criterion_4():
    law = asy.LatticeLaw.bernoulli(0.3)
    n, parts = 200, []
    for A in (0.45, 0.6):
        log_p, exponent, _ = asy.bahadur_rao_tail(law, A, n)
        exact = float(binom.sf(math.ceil(n * A - 1e-9) - 1, n, 0.3))
        rel = abs(math.exp(log_p) / exact - 1)
        gap = abs(exponent - legendre_grid(law.cgf, A, 20.0))
        assert rel <= 0.10, (A, rel)
        assert gap <= 1e-8, (A, gap)
        parts.append(f"A={A}: rel={rel:.4f} exp_gap={gap:.1e}")
    return "; ".join(parts)


def criterion_5():
    delta, Q = 1.0, 2.0
    parts = []
    for n in (6, 8, 10):
        log_count, _ = asy.lattice_code_count(delta, Q, n)
        L = math.floor(n * Q / delta + 1e-9)
        gap = abs(log_count - math.log(asy.l1_lattice_count_exact(n, L)))
        assert gap <= 0.15, (n, gap)
        parts.append(f"n={n}: {gap:.3f}")
    _, f_star, _ = asy.lattice_code_exponent(delta, Q)
    s = np.linspace(1e-3, 5.0, 50001)
    vals = Q * s - np.log(np.tanh(delta * s / 2))
    i = int(np.argmin(vals))
    res = optimize.minimize_scalar(lambda t: Q * t - math.log(math.tanh(delta * t / 2)),
                                   bounds=(s[i - 1], s[i + 1]), method="bounded", options={"xatol": 1e-13})
    fgap = abs(f_star - min(res.fun, vals[i]))
    assert fgap <= 1e-10, fgap
    return "log-count gaps " + ", ".join(parts) + f"; f* gap={fgap:.1e}"


def criterion_6():
    n, worst = 100, 0.0
    for n1 in (10, 30, 50):
        exact = float(-betaln(n1 + 1, n - n1 + 1) / n)
        worst = max(worst, abs(asy.mixture_redundancy(n, n1) - exact))
    assert worst <= 5e-3, worst
    n = 1000
    gap = asy.mixture_redundancy_exact_uniform(n, 500) - binary_entropy(0.5)
    lead = math.log(n) / (2 * n)
    rel = abs(gap / lead - 1)
    assert rel <= 0.2, rel
    return f"max approx gap={worst:.2e}; (gap to H)/(ln n/2n) - 1 = {rel:.3f}"


# -- exponents ---------------------------------------------------------------------


def criterion_7():
    worst_grid, worst_lin, worst_sp = 0.0, 0.0, 0.0
    offenders = []
    for W in _channels_2x3():
        P = np.full(W.shape[0], 1.0 / W.shape[0])
        rates = rate_grid(W)
        vals = [rc_exponent(W, P, R) for R in rates]
        grid, _ = rc_grid_curve(W, P, rates, denom=200)
        gaps = [abs(v.value - g) for v, g in zip(vals, grid)]
        worst_grid = max(worst_grid, max(gaps))
        j = int(np.argmax(gaps))
        if gaps[j] > 2e-3:
            # diagnostic only: the same point on the finest supported grid
            fine = abs(rc_grid_curve(W, P, [rates[j]], denom=400)[0][0] - vals[j].value)
            offenders.append(f"min W={W.min():.4f} R={rates[j]:.4f} gap@200={gaps[j]:.2e} gap@400={fine:.2e}")
        e0 = rc_exponent(W, P, 0.0).value
        rcr = vals[0].info["critical_rate"]
        for R in np.r_[np.linspace(0.0, rcr, 5), [R for R in rates if R <= rcr]]:
            worst_lin = max(worst_lin, abs(rc_exponent(W, P, R).value - (e0 - R)))
        for R, v in zip(rates, vals):
            if R >= rcr:
                worst_sp = max(worst_sp, abs(v.value - sp_exponent(W, P, R).value))
    assert worst_grid <= 2e-3, (worst_grid, offenders)
    assert worst_lin <= 1e-8, worst_lin
    assert worst_sp <= 1e-4, worst_sp
    return f"|rc-grid|<={worst_grid:.2e} |rc-(E0-R)|<={worst_lin:.1e} |rc-sp|<={worst_sp:.1e}"


def criterion_8():
    worst = 0.0
    for W in _channels_2x3():
        P = np.full(W.shape[0], 1.0 / W.shape[0])
        for R in rate_grid(W):
            worst = max(worst, abs(rc_exponent(W, P, R).value - rc_exponent_mmi(W, P, R).value))
    assert worst <= 1e-4, worst
    return f"max |ml-mmi| = {worst:.2e}"


def criterion_9():
    rng = np.random.default_rng(99)
    worst_point, worst_opt = -math.inf, -math.inf
    for W in random_channels(20, 3, 3, seed=909):
        R = 0.5 * uniform_mi(W)
        primal = rc_exponent(W, U3, R).value
        for _ in range(100):
            d = DualParams(float(rng.uniform()), float(rng.exponential(2.0)), rng.normal(scale=2.0, size=3))
            worst_point = max(worst_point, dual_rc_bound(W, U3, R, None, d) - primal)
        worst_opt = max(worst_opt, dual_rc_optimize(W, U3, R)[1] - primal)
    assert worst_point <= 1e-9, worst_point
    assert worst_opt <= 1e-9, worst_opt
    return f"max(dual-primal): random points {worst_point:.3f}, optimized {worst_opt:.2e}"


def criterion_10():
    worst = 0.0
    for p in (0.05, 0.1, 0.2):
        W = np.array([[1 - p, p], [p, 1 - p]])
        C = math.log(2) - binary_entropy(p)
        for R in np.linspace(C, math.log(2), 12)[1:-1]:
            ref = binary_divergence(bsc_gv_bisection(R), p)
            worst = max(worst, abs(correct_decoding_exponent(W, U2, R).value - ref))
    assert worst <= 1e-6, worst
    return f"max |cd - D(delta_GV||p)| = {worst:.2e}"


def criterion_11():
    n, R = 400, 0.2
    slope = -log_ensemble_error_probability_exact(BSC, U2, n, R) / n
    target = rc_exponent(BSC, U2, R).value
    gap = abs(slope - target)
    assert gap <= 0.05, gap
    return f"-(1/n) ln Pe = {slope:.5f}, rc = {target:.5f}, gap = {gap:.4f}"


def criterion_12():
    d = 0.1
    J = np.array([[(1 - d) / 2, d / 2], [d / 2, (1 - d) / 2]])
    H = binary_entropy(d)
    zeros = [sw_binning_exponent(J, R).value for R in (0.0, 0.3 * H, 0.7 * H, H)]
    assert all(v == 0.0 for v in zeros), zeros
    rates = np.linspace(H + 0.03, math.log(2) - 0.01, 5)
    grid, _ = sw_grid_curve(J, rates, denom=200)
    worst = max(abs(sw_binning_exponent(J, R).value - g) for R, g in zip(rates, grid))
    assert worst <= 2e-3, worst
    return f"zero below H(X|Y); max |sw-grid| = {worst:.2e}"


# -- typical-code ensembles -------------------------------------------------------------


def criterion_13():
    worst = 0.0
    for t in (6.0, -6.0):
        # n_eff = 10, m = e^{10 A}, m p = e^{10 (A - B)} = e^t
        A, B = 1.0, 1.0 - t / 10
        pr = tce.TceParams(A, B)
        n_eff = 10.0
        m = round(math.exp(n_eff * A))
        p = math.exp(t) / m
        for s in (0.5, 1.0, 2.0):
            pred = n_eff * tce.moment_exponent(pr, s)
            worst = max(worst, abs(tce.log_exact_binomial_moment(m, p, s) - pred))
    assert worst <= 0.1, worst
    # tail exponents against exact tails
    tail_worst = 0.0
    pr = tce.TceParams(0.5, 1.0)
    for target in (4, 6, 8, 10):
        n_eff = target / 0.5
        m = round(math.exp(n_eff * 0.5))
        p = math.exp(-n_eff)
        p_hit = -math.expm1(m * math.log1p(-p))
        tail_worst = max(tail_worst, abs(-math.log(p_hit) / n_eff - tce.tail_upper_exponent(pr, -0.1)))
    assert tail_worst <= 0.05, tail_worst
    rng = np.random.default_rng(21)
    for _ in range(100):
        m = int(rng.integers(5, 2000))
        p = float(rng.uniform(0.001, 0.9))
        k = math.ceil(float(rng.uniform(p, 1.0)) * m)
        if k <= m:
            assert tce.binomial_tail_upper(m, p, k) <= math.exp(-m * binary_kl(k / m, p)) * (1 + 1e-10)
    return f"max |ln E N^s - prediction| = {worst:.4f}; tail exponent gap = {tail_worst:.4f}; Chernoff holds"


# -- expectations ---------------------------------------------------------------------------


def criterion_14():
    exp1_law = ex.MgfSpec.exponential()
    v = ex.expect_ln(exp1_law)
    assert abs(v + 0.5772156649015329) <= 1e-6, v
    mean, se = ex.mc_expectation(exp1_law.sample, np.log, 10**7, seed=14)
    assert abs(v - mean) <= 3 * se, (v, mean, se)
    f01 = ex.frac_moment_01(exp1_law, 0.5)
    assert abs(f01 - math.sqrt(math.pi) / 2) <= 1e-7, f01
    fg = ex.frac_moment_general(exp1_law, 1.5)
    assert abs(fg - math.gamma(2.5)) <= 1e-6, fg
    P, Pt = [0.4, 0.3, 0.2, 0.1], [0.1, 0.2, 0.3, 0.4]
    k = np.arange(1, 20000, dtype=float)
    series = sum(p * float(np.sum(k**0.5 * (1 - q) ** (k - 1) * q)) for p, q in zip(P, Pt))
    g = ex.guesswork_moment(P, Pt, 0.5)
    assert abs(g - series) <= 1e-6, (g, series)
    c = ex.simo_capacity(1.0, [1.0])
    assert abs(c - math.e * exp1(1.0)) <= 1e-8, c
    h = ex.cauchy_entropy(1)

    def cauchy(rng, size):
        return rng.standard_cauchy(size)

    hm, hse = ex.mc_expectation(cauchy, lambda x: math.log(math.pi) + np.log1p(x * x), 10**7, seed=41)
    assert abs(h - hm) <= 5e-3, (h, hm)
    assert abs(h - math.log(4 * math.pi)) <= 5e-3, h
    return (f"E ln X={v:.9f} (MC {mean:.5f}+-{se:.1e}); guesswork gap={abs(g - series):.1e}; "
            f"Cauchy h={h:.6f} vs MC {hm:.4f}")


_BATTERY = [
    ex.MgfSpec.exponential(), ex.MgfSpec.exponential(0.5), ex.MgfSpec.gamma(2.0, 1.0), ex.MgfSpec.gamma(0.5, 1.0),
    ex.MgfSpec.uniform(0.0, 2.0), ex.MgfSpec.uniform(0.5, 1.5), ex.MgfSpec.gaussian_squares(4, 1.0),
    ex.MgfSpec.exp_sum([1.0, 2.0, 3.0]), ex.MgfSpec.bernoulli_sum(10, 0.5), ex.MgfSpec.poisson(3.0),
]


def criterion_15():
    f = ex.FnSpec.ln1p()
    methods = ("chernoff", "chernoff-tilde", "cheb-cantelli")
    checks = 0
    for k, m in enumerate(_BATTERY):
        x = m.sample(np.random.default_rng(1500 + k), 2 * 10**6)
        n = x.size

        def stat(y):
            return float(y.mean()), float(y.std(ddof=1)) / math.sqrt(n)

        EX2 = m.var + m.mean**2
        est, se = stat(np.log1p(x))
        best = ex.rji_lower_bound(f, m, "best")
        assert best <= est + 3 * se, (m.name, "rji", best, est)
        for meth in methods:
            if meth != "cheb-cantelli" and m.s_max <= 0:
                continue
            assert best >= ex.rji_lower_bound(f, m, meth), (m.name, meth)
        assert est - 3 * se <= math.log1p(m.mean)
        est2, se2 = stat(np.log1p(x) ** 2)
        assert est2 - 3 * se2 <= ex.capacity_second_moment_upper(1.0, m.mean, EX2), (m.name, "second moment")
        est3, se3 = stat(x**3)
        assert ex.jensen_like_product(ex.FnSpec.power(2.0), EX2, m.mean)[0] <= est3 + 3 * se3, (m.name, "product")
        checks += 5
    # iid reverse Jensen and the harmonic-mean bound
    n = 100
    iid = ex.rji_iid_bound(ex.MgfSpec.bernoulli_sum(1, 0.5), n, f, 0.05)
    est, se = ex.mc_expectation(ex.MgfSpec.bernoulli_sum(n, 0.5).sample, np.log1p, 2 * 10**6, seed=151)
    assert iid <= est + 3 * se
    hm, hse = ex.mc_expectation(lambda rng, size: rng.exponential(1.0, (size, 2)) * np.array([1.0, 2.0]),
                                lambda z: 2.0 / np.sum(1.0 / z, axis=1), 2 * 10**6, seed=152)
    assert hm - 3 * hse <= ex.harmonic_mean_upper([1.0, 2.0])
    # degenerate law: the bound reaches f(mu)
    mu = 2.0
    deg = ex.rji_lower_bound(f, ex.MgfSpec.constant(mu), "exact-q", q_exact=lambda a: mu if a < mu else 0.0)
    gap = abs(deg - math.log1p(mu))
    assert gap <= 1e-6, gap
    return f"{checks + 2} bound checks on {len(_BATTERY)} laws hold; best >= each method; degenerate gap={gap:.1e}"


def criterion_16():
    n, worst_slack, parts = 256, math.inf, []
    for p in (0.1, 0.3, 0.5):
        exact, upper = ex.kt_expected_length(p, n)
        red = exact - n * binary_entropy(p)
        slack = 0.5 * math.log(n) + 2 - red
        assert slack >= 0, (p, red)
        assert upper >= exact, (p, upper, exact)
        worst_slack = min(worst_slack, slack)
        parts.append(f"p={p}: redundancy {red:.3f}")
    return "; ".join(parts) + f"; bound 0.5 ln n + 2 = {0.5 * math.log(n) + 2:.3f}"


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 17)}


def run_criterion(k: int) -> tuple[str, str]:
    t0 = time.perf_counter()
    try:
        detail = CRITERIA[k]()
        status = "PASS"
    except AssertionError as e:
        detail, status = f"assertion failed: {e!r}", "FAIL"
    detail += f" [{time.perf_counter() - t0:.1f}s]"
    RESULTS[k] = (status, detail)
    return status, detail


def format_line(k: int) -> str:
    status, detail = RESULTS[k]
    return f"criterion {k:2d}: {status}  {detail}"


@pytest.mark.parametrize("k", list(CRITERIA))
def test_criterion(k):
    status, detail = run_criterion(k)
    print(format_line(k))
    assert status == "PASS", detail


if __name__ == "__main__":
    failed = 0
    for k in CRITERIA:
        run_criterion(k)
        print(format_line(k), flush=True)
        failed += RESULTS[k][0] == "FAIL"
    sys.exit(1 if failed else 0)

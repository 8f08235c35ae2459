import math

import numpy as np
import pytest
from scipy import integrate, optimize
from scipy.stats import chi2, norm

from artifact.asymptotics import DensityLaw, bahadur_rao_tail, hypersphere_surface
from artifact.continuous_types import (
    ArSpec,
    ExpFamily,
    GaussianTypeSpec,
    MaxentError,
    autocorr_event_exponent,
    conditional_volume_exponent,
    gaussian_ld_exponent,
    gaussian_volume_exponent,
    generalized_gaussian_entropy,
    gm_volume_exponent,
    kolmogorov_szego_entropy,
    log_partition,
    maxent_solve,
    mixed_stat_event_exponent,
    mmse_from_covariance,
    quadratic_event_exponent,
    refined_volume_exponent,
    yule_walker,
)

HALF_LOG_2PIE = 0.5 * math.log(2 * math.pi * math.e)


def _random_pd(rng, k):
    a = rng.normal(size=(k, k))
    return a @ a.T + 0.5 * np.eye(k)


def _direct_entropy(fam, theta, lo=-np.inf, hi=np.inf):
    lz = log_partition(fam, theta)

    def logp(x):
        return float(np.dot(theta, [f(np.array(x)) for f in fam.statistics])) - lz

    val = 0.0
    for a, b in ((lo, 0.0), (0.0, hi)):
        v, _ = integrate.quad(lambda x: -math.exp(logp(x)) * logp(x), a, b, epsabs=1e-12, epsrel=1e-12, limit=200)
        val += v
    return val


def test_gaussian_volume_exponent():
    assert gaussian_volume_exponent(1 / (2 * math.pi * math.e)) == pytest.approx(0.0, abs=1e-15)
    assert gaussian_volume_exponent(1.0) == pytest.approx(1.4189385332, abs=1e-10)
    exact, _ = hypersphere_surface(200, 1.0)
    assert abs(exact / 200 - gaussian_volume_exponent(1.0)) < 1e-2
    with pytest.raises(ValueError):
        gaussian_volume_exponent(0.0)


def test_refined_volume_exponent():
    assert refined_volume_exponent(3.0, 0.0) == gaussian_volume_exponent(3.0)
    assert refined_volume_exponent(2.0, 1.0) == pytest.approx(HALF_LOG_2PIE, abs=1e-15)
    with pytest.raises(ValueError):
        refined_volume_exponent(1.0, 1.0)
    for s, mu in ((2.0, 0.3), (5.0, -2.0), (1.0, 0.9)):
        assert refined_volume_exponent(s, mu) < gaussian_volume_exponent(s)


def test_conditional_volume_exponent_examples():
    spec = GaussianTypeSpec(2.0, c=[0.0], gram=1.0)
    assert conditional_volume_exponent(spec) == pytest.approx(gaussian_volume_exponent(2.0), abs=1e-15)
    spec = GaussianTypeSpec(1.0, c=[0.6], gram=1.0)
    assert conditional_volume_exponent(spec) == pytest.approx(0.5 * math.log(2 * math.pi * math.e * 0.64), abs=1e-14)
    rng = np.random.default_rng(5)
    full = _random_pd(rng, 3)
    spec = GaussianTypeSpec(full[0, 0], c=full[0, 1:], gram=full[1:, 1:])
    expected = HALF_LOG_2PIE + 0.5 * math.log(np.linalg.det(full) / np.linalg.det(full[1:, 1:]))
    assert conditional_volume_exponent(spec) == pytest.approx(expected, abs=1e-12)


def test_conditional_volume_exponent_monotone_in_conditioners():
    rng = np.random.default_rng(6)
    for _ in range(20):
        full = _random_pd(rng, 5)
        vals = [conditional_volume_exponent(GaussianTypeSpec(full[0, 0]))]
        for k in range(1, 5):
            vals.append(conditional_volume_exponent(
                GaussianTypeSpec(full[0, 0], c=full[0, 1:k + 1], gram=full[1:k + 1, 1:k + 1])))
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_mmse_from_covariance():
    full = np.diag([2.0, 1.0, 3.0])
    assert mmse_from_covariance(full, full[1:, 1:]) == pytest.approx(2.0)
    s, c, py = 1.5, 0.7, 0.9
    full = np.array([[s, c], [c, py]])
    assert mmse_from_covariance(full, full[1:, 1:]) == pytest.approx(s - c * c / py, abs=1e-14)
    rng = np.random.default_rng(7)
    full = _random_pd(rng, 4)
    b = np.linalg.solve(full[1:, 1:], full[1:, 0])
    residual = full[0, 0] - full[0, 1:] @ b
    assert mmse_from_covariance(full, full[1:, 1:]) == pytest.approx(residual, abs=1e-10)
    with pytest.raises(ValueError):
        mmse_from_covariance(np.array([[1.0, 2.0], [2.0, 1.0]]), np.array([[1.0]]))


def test_yule_walker_examples():
    ar = yule_walker([1.0, 0.5])
    assert ar.coeffs == pytest.approx([0.5])
    assert ar.sigma2 == pytest.approx(0.75)
    ar = yule_walker([2.0, 0.0, 0.0])
    assert ar.coeffs == pytest.approx([0.0, 0.0])
    assert ar.sigma2 == pytest.approx(2.0)
    ar = yule_walker([1.0, 0.5, 0.4])
    expected = np.linalg.solve(np.array([[1.0, 0.5], [0.5, 1.0]]), [0.5, 0.4])
    assert ar.coeffs == pytest.approx(expected, abs=1e-14)
    assert ar.sigma2 == pytest.approx(1.0 - expected @ [0.5, 0.4], abs=1e-14)
    with pytest.raises(ValueError):
        yule_walker([1.0, 1.5])


def test_yule_walker_forward_check():
    # autocorrelations of the fitted AR model, by integrating its spectrum
    s = np.array([1.0, 0.6, 0.3, 0.1])
    ar = yule_walker(s)
    for j in range(s.size):
        v, _ = integrate.quad(lambda w: ar.spectrum(np.array([w]))[0] * math.cos(j * w), -math.pi, math.pi,
                              epsabs=1e-13, epsrel=1e-12, limit=200)
        assert v / (2 * math.pi) == pytest.approx(s[j], abs=1e-10)


def test_gm_volume_exponent():
    white = yule_walker([3.0])
    assert gm_volume_exponent(white) == pytest.approx(gaussian_volume_exponent(3.0), abs=1e-15)
    ar = yule_walker([1.0, 0.5])
    assert gm_volume_exponent(ar) == pytest.approx(0.5 * math.log(2 * math.pi * math.e * 0.75), abs=1e-15)
    assert kolmogorov_szego_entropy(ar) == pytest.approx(gm_volume_exponent(ar), abs=1e-6)
    ar3 = yule_walker([1.0, 0.6, 0.3, 0.1])
    assert kolmogorov_szego_entropy(ar3) == pytest.approx(gm_volume_exponent(ar3), abs=1e-6)


def test_maxent_gaussian():
    fam = ExpFamily([np.square])
    for s in (0.5, 1.0, 3.0):
        theta, h = maxent_solve(fam, [s])
        assert theta[0] == pytest.approx(-1 / (2 * s), rel=1e-8)
        assert h == pytest.approx(0.5 * math.log(2 * math.pi * math.e * s), abs=1e-8)
        assert h == pytest.approx(_direct_entropy(fam, theta), abs=1e-6)


def test_maxent_laplacian():
    fam = ExpFamily([np.abs])
    for q in (0.3, 1.0, 2.5):
        theta, h = maxent_solve(fam, [q])
        assert h == pytest.approx(math.log(2 * math.e * q), abs=1e-8)
        assert h == pytest.approx(_direct_entropy(fam, theta), abs=1e-6)


def test_maxent_generalized_gaussian():
    m = 3
    fam = ExpFamily([lambda x: np.abs(x) ** m])
    theta, h = maxent_solve(fam, [1.0])
    assert h == pytest.approx(generalized_gaussian_entropy(m, 1.0), abs=1e-8)
    assert h == pytest.approx(_direct_entropy(fam, theta), abs=1e-6)
    # closed form for the density proportional to exp(-|x|^3 / 3)
    z = 2 * math.gamma(1 / 3) * 3 ** (1 / 3) / 3
    assert generalized_gaussian_entropy(3, 1.0) == pytest.approx(math.log(z) + 1 / 3, abs=1e-12)


def test_maxent_two_statistics_and_gradient():
    fam = ExpFamily([np.abs, np.square])
    theta, h = maxent_solve(fam, [1.0, 1.6])
    assert h == pytest.approx(_direct_entropy(fam, theta), abs=1e-6)
    lz, mean, _ = fam.moments(theta)
    np.testing.assert_allclose(mean, [1.0, 1.6], atol=1e-8)
    eps = 1e-5
    for j in range(2):
        e = np.zeros(2)
        e[j] = eps
        fd = (log_partition(fam, theta + e) - log_partition(fam, theta - e)) / (2 * eps)
        assert fd == pytest.approx(mean[j], rel=1e-5)


def test_maxent_discrete_domain():
    fam = ExpFamily([lambda x: x], domain=np.array([0.0, 1.0, 2.0]))
    theta, h = maxent_solve(fam, [1.0])
    assert theta[0] == pytest.approx(0.0, abs=1e-8)
    assert h == pytest.approx(math.log(3), abs=1e-10)


def test_maxent_infeasible_moment():
    fam = ExpFamily([np.abs, np.square])
    with pytest.raises((MaxentError, ValueError)):
        maxent_solve(fam, [1.0, 0.5])


def test_gaussian_ld_exponent():
    assert gaussian_ld_exponent(1.5, 1.5) == 0.0
    assert gaussian_ld_exponent(2.0, 1.0) == pytest.approx(0.5 * (1 - math.log(2)), abs=1e-15)
    with pytest.raises(ValueError):
        gaussian_ld_exponent(0.5, 1.0)


def test_gaussian_ld_exponent_vs_exact_chi_square():
    A = 1.3
    e = gaussian_ld_exponent(A, 1.0)
    n1, n2 = 2000, 4000
    slope = -(chi2.logsf(n2 * A, n2) - chi2.logsf(n1 * A, n1)) / (n2 - n1)
    assert slope == pytest.approx(e, abs=1e-3)
    # Monte Carlo of the event itself against the exact chi-square tail
    n, trials = 50, 10**7
    rng = np.random.default_rng(11)
    hits = 0
    for _ in range(10):
        hits += int(np.count_nonzero(rng.chisquare(n, trials // 10) >= n * A))
    p_hat = hits / trials
    se = math.sqrt(p_hat * (1 - p_hat) / trials)
    assert abs(p_hat - chi2.sf(n * A, n)) <= 3 * se
    assert p_hat <= math.exp(-n * e)


def _noncentral_chernoff(A, B, sigma2):
    def cgf(t):
        return -0.5 * math.log1p(-2 * t * sigma2) + t * A * A / (1 - 2 * t * sigma2)

    tmax = 1 / (2 * sigma2)
    res = optimize.minimize_scalar(lambda t: -(t * B - cgf(t)), bounds=(0, tmax * (1 - 1e-12)),
                                   method="bounded", options={"xatol": 1e-14})
    return -res.fun


def _quadratic_grid(A, B, sigma2, step=1e-3):
    mu = np.arange(-2.0, 4.0, step)
    v = np.arange(step, 8.0, step)
    best = math.inf
    for chunk in np.array_split(mu, 40):
        m, vv = np.meshgrid(chunk, v, indexing="ij")
        obj = 0.5 * ((vv + m * m) / sigma2 - np.log(vv / sigma2) - 1)
        obj[vv + (m - A) ** 2 < B] = np.inf
        best = min(best, float(obj.min()))
    return best


def test_quadratic_event_exponent():
    assert quadratic_event_exponent(0.0, 2.0, 1.0) == pytest.approx(gaussian_ld_exponent(2.0, 1.0), abs=1e-10)
    val = quadratic_event_exponent(1.0, 3.0, 1.0)
    assert val == pytest.approx(_quadratic_grid(1.0, 3.0, 1.0), abs=1e-4)
    assert val <= _quadratic_grid(1.0, 3.0, 1.0) + 1e-12
    assert val == pytest.approx(_noncentral_chernoff(1.0, 3.0, 1.0), abs=1e-8)
    assert quadratic_event_exponent(1.0, 1.5, 1.0) == 0.0
    with pytest.raises(ValueError):
        quadratic_event_exponent(1.0, 0.0, 1.0)


def test_autocorr_event_exponent():
    assert autocorr_event_exponent(1e-6) == pytest.approx(0.0, abs=1e-11)
    assert autocorr_event_exponent(0.5) == pytest.approx(-0.5 * math.log(0.75), abs=1e-15)
    with pytest.raises(ValueError):
        autocorr_event_exponent(1.0)


def _autocorr_chernoff(rho, n):
    # sup_t -(1/n) ln E exp(t (sum x_t x_{t-1} - rho sum x_t^2)), exact at finite n
    lam = np.cos(np.pi * np.arange(1, n + 1) / (n + 1)) - rho
    tmax = 1 / (2 * lam.max())
    res = optimize.minimize_scalar(lambda t: -np.sum(np.log1p(-2 * t * lam)) / (2 * n),
                                   bounds=(0, tmax * (1 - 1e-12)), method="bounded", options={"xatol": 1e-14})
    return -res.fun


def test_autocorr_event_exponent_vs_chernoff_and_mc():
    rho = 0.3
    e = autocorr_event_exponent(rho)
    assert _autocorr_chernoff(rho, 20000) == pytest.approx(e, abs=1e-4)
    n, trials = 200, 10**6
    bound = math.exp(-n * _autocorr_chernoff(rho, n))
    rng = np.random.default_rng(12)
    hits = 0
    for _ in range(20):
        x = rng.standard_normal((trials // 20, n))
        hits += int(np.count_nonzero(np.sum(x[:, 1:] * x[:, :-1], axis=1) >= rho * np.sum(x * x, axis=1)))
    p_hat = hits / trials
    se = math.sqrt(max(p_hat, 1 / trials) / trials)
    assert p_hat <= bound + 3 * se


def test_mixed_stat_event_exponent():
    assert mixed_stat_event_exponent(math.sqrt(2 / math.pi), 1.0) == 0.0

    def cgf(t):
        return t * t / 2 + math.log(2) + norm.logcdf(t)

    for A in (1.2, 1.5):
        res = optimize.minimize_scalar(lambda t: -(t * A - cgf(t)), bounds=(0, 30), method="bounded",
                                       options={"xatol": 1e-12})
        assert mixed_stat_event_exponent(A, 1.0) == pytest.approx(-res.fun, abs=1e-6)
    # scaling: the event with sigma and A*sigma has the same exponent
    assert mixed_stat_event_exponent(3.0, 4.0) == pytest.approx(mixed_stat_event_exponent(1.5, 1.0), abs=1e-6)
    with pytest.raises(ValueError):
        mixed_stat_event_exponent(0.5, 1.0)


def test_mixed_stat_event_mc():
    n, A, trials = 60, 1.2, 10**7
    e = mixed_stat_event_exponent(A, 1.0)
    law = DensityLaw(lambda t: t * t / 2 + math.log(2) + norm.logcdf(t), math.sqrt(2 / math.pi))
    log_br, exponent, _ = bahadur_rao_tail(law, A, n)
    assert exponent == pytest.approx(e, abs=1e-6)
    rng = np.random.default_rng(13)
    hits = 0
    for _ in range(20):
        x = rng.standard_normal((trials // 20, n))
        hits += int(np.count_nonzero(np.abs(x).sum(axis=1) >= n * A))
    p_hat = hits / trials
    se = math.sqrt(max(p_hat, 1 / trials) / trials)
    assert p_hat <= math.exp(-n * e) + 3 * se
    assert abs(p_hat - math.exp(log_br)) <= 3 * se + 0.1 * math.exp(log_br)

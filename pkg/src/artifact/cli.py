"""Command-line front end emitting plot-ready CSV.

Subcommands
-----------
exponent    exponent-versus-rate sweeps for a channel or a joint source
asymptotic  saddle-point estimates next to exact values
expect      integral-representation expectations, optionally with a MC check
bounds      reverse-Jensen and Jensen-like bounds next to MC ground truth

Exit codes: 0 on success, 2 on malformed input, 3 when a solver or a
quadrature fails. Rates are in nats unless ``--bits`` is given.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TextIO

import numpy as np
from scipy.special import betaln, gammaln

from . import asymptotics as asy
from . import expectations as ex
from .exponents import (
    DecoderScore,
    ExponentSolverError,
    cd_grid_curve,
    correct_decoding_exponent,
    dual_rc_optimize,
    ex_grid_curve,
    expurgated_exponent,
    mmi_grid_curve,
    rc_exponent,
    rc_exponent_mmi,
    rc_grid_curve,
    sp_exponent,
    sp_grid_curve,
    sw_binning_exponent,
    sw_grid_curve,
)

__all__ = ["main", "main_entry", "read_spec_file", "write_spec_file", "parse_rates", "ParseError", "THREADS_ENV"]

THREADS_ENV = "ARTIFACT_THREADS"
_LN2 = math.log(2.0)


class ParseError(ValueError):
    """Malformed command-line value or specification file (exit code 2)."""


# ---------------------------------------------------------------------------
# Specification files
# ---------------------------------------------------------------------------


def read_spec_file(text: str, kind: str = "dmc") -> np.ndarray:
    """Parse a ``dmc`` channel file or a ``src`` joint-source file.

    The first non-comment line is ``<kind> <|X|> <|Y|>``; then ``|X|`` rows of
    ``|Y|`` decimal reals follow. Lines starting with ``#`` are comments.
    Channel rows must each sum to 1, a joint source must sum to 1 overall
    (tolerance ``1e-9``).

    Raises
    ------
    ParseError
        With the offending line number.
    """
    rows: list[tuple[int, list[float]]] = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 3 or parts[0] != kind:
                raise ParseError(f"line {lineno}: expected header '{kind} <|X|> <|Y|>'")
            try:
                nx, ny = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(f"line {lineno}: alphabet sizes must be integers") from None
            if nx < 1 or ny < 1:
                raise ParseError(f"line {lineno}: alphabet sizes must be positive")
            header = (nx, ny)
            continue
        try:
            vals = [float(v) for v in parts]
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric entry") from None
        if len(vals) != header[1]:
            raise ParseError(f"line {lineno}: expected {header[1]} entries, found {len(vals)}")
        if any(not math.isfinite(v) or v < 0 for v in vals):
            raise ParseError(f"line {lineno}: entries must be finite and nonnegative")
        if kind == "dmc" and abs(math.fsum(vals) - 1.0) > 1e-9:
            raise ParseError(f"line {lineno}: row sums to {math.fsum(vals)!r}, not 1")
        rows.append((lineno, vals))
    if header is None:
        raise ParseError("missing header line")
    if len(rows) != header[0]:
        raise ParseError(f"expected {header[0]} rows, found {len(rows)}")
    arr = np.array([r for _, r in rows], dtype=float)
    if kind == "src" and abs(math.fsum(arr.ravel()) - 1.0) > 1e-9:
        raise ParseError(f"line {rows[-1][0]}: joint probabilities sum to {arr.sum()!r}, not 1")
    return arr


def write_spec_file(matrix, kind: str = "dmc", stream: TextIO | None = None) -> str:
    """Serialize a channel or joint source with 17 significant digits (exact round trip)."""
    a = np.asarray(matrix, dtype=float)
    lines = [f"{kind} {a.shape[0]} {a.shape[1]}"]
    lines += [" ".join(format(v, ".17g") for v in row) for row in a]
    text = "\n".join(lines) + "\n"
    if stream is not None:
        stream.write(text)
    return text


def parse_rates(spec: str) -> np.ndarray:
    """``a:b:k`` -> ``k`` equally spaced rates from ``a`` to ``b``."""
    try:
        a, b, k = spec.split(":")
        lo, hi, steps = float(a), float(b), int(k)
    except ValueError:
        raise ParseError(f"rates must look like 'min:max:steps', got {spec!r}") from None
    if steps < 1 or lo > hi or lo < 0:
        raise ParseError("need 0 <= min <= max and steps >= 1")
    return np.linspace(lo, hi, steps)


def _floats(spec: str, what: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in spec.split(",")], dtype=float)
    except ValueError:
        raise ParseError(f"{what} must be a comma-separated list of numbers") from None


def _num(x: float) -> str:
    return repr(float(x))


def _emit(out: TextIO, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    out.write(",".join(header) + "\n")
    for r in rows:
        out.write(",".join(v if isinstance(v, str) else _num(v) for v in r) + "\n")


def _threads(arg: int | None) -> int:
    if arg is not None:
        n = arg
    else:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise ParseError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ParseError("thread count must be >= 0")
    return (os.cpu_count() or 1) if n == 0 else n


# ---------------------------------------------------------------------------
# exponent
# ---------------------------------------------------------------------------


def _primal_row(job):
    quantity, w, p, R, decoder = job
    if quantity == "sw":
        r = sw_binning_exponent(w, R)
    elif quantity == "rc-mmi" or (quantity == "rc" and decoder == "mmi"):
        r = rc_exponent_mmi(w, p, R)
    elif quantity == "rc":
        r = rc_exponent(w, p, R)
    elif quantity == "sp":
        r = sp_exponent(w, p, R)
    elif quantity == "ex":
        r = expurgated_exponent(w, p, R)
    else:
        r = correct_decoding_exponent(w, p, R)
    return r.value, r.residual


def _dual_row(job):
    _, w, p, R, _ = job
    return dual_rc_optimize(w, p, R)[1], 0.0


def _map(fn: Callable, jobs: list, threads: int) -> list:
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def cmd_exponent(args, out: TextIO) -> None:
    q = args.quantity
    if q == "sw":
        if args.dsbs is not None:
            d = args.dsbs
            w = np.array([[(1 - d) / 2, d / 2], [d / 2, (1 - d) / 2]])
        elif args.source is not None:
            w = read_spec_file(_read(args.source), "src")
        else:
            raise ParseError("sw needs --source FILE or --dsbs P")
        p = None
    else:
        if args.bsc is not None:
            if not 0 <= args.bsc <= 1:
                raise ParseError("--bsc must lie in [0, 1]")
            w = np.array([[1 - args.bsc, args.bsc], [args.bsc, 1 - args.bsc]])
        elif args.channel is not None:
            w = read_spec_file(_read(args.channel), "dmc")
        else:
            raise ParseError(f"{q} needs --channel FILE or --bsc P")
        if args.input == "uniform":
            p = np.full(w.shape[0], 1.0 / w.shape[0])
        else:
            p = _floats(args.input, "--input")
            if p.size != w.shape[0] or np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
                raise ParseError("--input must be a probability vector over the input alphabet")
    rates = parse_rates(args.rates)
    if args.bits:
        rates = rates * _LN2
    decoder = args.decoder
    if decoder == "mmi" and q not in ("rc", "rc-mmi"):
        raise ParseError("--decoder mmi applies to rc only")
    method = args.method
    if method == "dual":
        if q != "rc" or decoder != "ml":
            raise ParseError("the dual method covers rc with the ml decoder only")
        vals = _map(_dual_row, [(q, w, p, R, decoder) for R in rates], _threads(args.threads))
    elif method == "grid":
        if q == "sw":
            v, _ = sw_grid_curve(w, rates, args.denom)
        elif q == "rc" and decoder == "ml":
            v, _ = rc_grid_curve(w, p, rates, DecoderScore.ml(w), args.denom)
        else:
            fn = {"rc": mmi_grid_curve, "rc-mmi": mmi_grid_curve, "sp": sp_grid_curve, "ex": ex_grid_curve,
                  "cd": cd_grid_curve}[q]
            v, _ = fn(w, p, rates, args.denom)
        vals = [(float(x), 0.0) for x in v]
    else:
        vals = _map(_primal_row, [(q, w, p, R, decoder) for R in rates], _threads(args.threads))
    scale = 1.0 / _LN2 if args.bits else 1.0
    _emit(out, ["rate", "exponent", "method", "residual"],
          [(R * scale, v * scale, method, res) for R, (v, res) in zip(rates, vals)])


# ---------------------------------------------------------------------------
# asymptotic
# ---------------------------------------------------------------------------


def _ints(spec: str, what: str) -> list[int]:
    try:
        return [int(v) for v in spec.split(",")]
    except ValueError:
        raise ParseError(f"{what} must be a comma-separated list of integers") from None


def cmd_asymptotic(args, out: TextIO) -> None:
    rows = []
    kind = args.kind
    for n in _ints(args.n, "--n"):
        if kind == "stirling":
            exact, approx = math.lgamma(n + 1), asy.stirling(n)[1]
        elif kind == "binom":
            if args.k is None:
                raise ParseError("binom needs --k")
            exact = math.lgamma(n + 1) - math.lgamma(args.k + 1) - math.lgamma(n - args.k + 1)
            approx = asy.binomial_count_saddle(n, args.k).log_estimate
        elif kind == "sphere":
            exact, approx = asy.hypersphere_surface(n, args.s)
        elif kind == "tail":
            if args.bernoulli is None or args.A is None:
                raise ParseError("tail needs --bernoulli P and --A A")
            p, A = args.bernoulli, args.A
            k = np.arange(math.ceil(n * A - 1e-9), n + 1)
            exact = float(np.logaddexp.reduce(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
                                              + k * math.log(p) + (n - k) * math.log1p(-p)))
            approx = asy.bahadur_rao_tail(asy.LatticeLaw.bernoulli(p), A, n)[0]
        elif kind == "lattice":
            L = math.floor(n * args.Q / args.delta + 1e-9)
            exact = math.log(asy.l1_lattice_count_exact(n, L))
            approx = asy.lattice_code_count(args.delta, args.Q, n)[0]
        else:
            if args.n1 is None:
                raise ParseError("redundancy needs --n1")
            exact = float(-betaln(args.n1 + 1, n - args.n1 + 1))
            approx = n * asy.mixture_redundancy(n, args.n1)
        rows.append((str(n), exact, approx, math.exp(approx - exact)))
    _emit(out, ["n", "exact_log", "approx_log", "ratio"], rows)


# ---------------------------------------------------------------------------
# expect and bounds
# ---------------------------------------------------------------------------


def _family(args) -> ex.MgfSpec:
    fam = args.family
    if fam is None:
        raise ParseError("--family is required")
    if fam == "exp":
        return ex.MgfSpec.exponential(args.rate)
    if fam == "gamma":
        return ex.MgfSpec.gamma(args.shape, args.rate)
    if fam == "bernoulli-sum":
        return ex.MgfSpec.bernoulli_sum(args.count, args.p)
    if fam == "chi2":
        return ex.MgfSpec.gaussian_squares(args.count, args.sigma2)
    if fam == "uniform":
        return ex.MgfSpec.uniform(args.a, args.b)
    if fam == "uniform01":
        return ex.MgfSpec.uniform(0.0, 1.0)
    if fam == "const":
        return ex.MgfSpec.constant(args.c)
    if fam == "poisson":
        return ex.MgfSpec.poisson(args.lam)
    raise ParseError(f"unknown family {fam!r}")


def _add_family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=["exp", "gamma", "bernoulli-sum", "chi2", "uniform", "uniform01", "const",
                                        "poisson"])
    p.add_argument("--rate", type=float, default=1.0, help="exp/gamma rate")
    p.add_argument("--shape", type=float, default=1.0, help="gamma shape")
    p.add_argument("--count", type=int, default=1, help="number of summands (bernoulli-sum, chi2)")
    p.add_argument("--p", type=float, default=0.5, help="Bernoulli parameter")
    p.add_argument("--sigma2", type=float, default=1.0, help="chi2 component variance")
    p.add_argument("--a", type=float, default=0.0, help="uniform lower end")
    p.add_argument("--b", type=float, default=1.0, help="uniform upper end")
    p.add_argument("--c", type=float, default=1.0, help="constant value")
    p.add_argument("--lam", type=float, default=1.0, help="Poisson mean")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1_000_000)


def _mc(sampler, h, args) -> tuple[float, float]:
    return ex.mc_expectation(sampler, h, args.samples, args.seed, workers=_threads(args.threads))


def _geometric_guesses(P: np.ndarray, Pt: np.ndarray):
    def sampler(rng, size):
        x = rng.choice(P.size, size=size, p=P)
        return rng.geometric(Pt[x]).astype(float)

    return sampler


def cmd_expect(args, out: TextIO) -> None:
    q = args.quantity
    h: Callable | None = None
    sampler = None
    if q == "guesswork":
        if args.dist is None or args.guess is None:
            raise ParseError("guesswork needs --dist and --guess")
        P, Pt = _floats(args.dist, "--dist"), _floats(args.guess, "--guess")
        value = ex.guesswork_moment(P, Pt, args.rho)
        sampler, h = _geometric_guesses(P, Pt), (lambda g: g ** args.rho)
    elif q in ("simo", "simo-var"):
        s2 = _floats(args.sigmas, "--sigmas")
        m = ex.MgfSpec.exp_sum(args.snr * s2)
        value = ex.simo_capacity(args.snr, s2) if q == "simo" else ex.simo_capacity_variance(args.snr, s2)
        sampler = m.sample
        h = np.log1p if q == "simo" else None
    elif q == "cauchy":
        value = ex.cauchy_entropy(args.dim)
        d = args.dim
        c = math.lgamma((d + 1) / 2) - (d + 1) / 2 * math.log(math.pi)

        def sampler(rng, size):
            z = rng.standard_normal((size, d)) / np.abs(rng.standard_normal((size, 1)))
            return np.sum(z * z, axis=1)

        h = lambda r2: -(c - (d + 1) / 2 * np.log1p(r2))  # noqa: E731
    elif q == "lnfact":
        m = _family(args)
        if args.family not in ("poisson", "bernoulli-sum", "const"):
            raise ParseError("lnfact needs an integer-valued family (poisson, bernoulli-sum, const)")
        value = ex.expect_ln_factorial(m.mean, lambda u: m(-u))
        sampler, h = m.sample, (lambda k: gammaln(k + 1))
    else:
        m = _family(args)
        sampler = m.sample
        if q == "ln":
            value, h = ex.expect_ln(m), np.log
        elif q == "ln1p":
            value, h = ex.expect_ln1p(m), np.log1p
        elif q == "var-ln1p":
            value = ex.var_ln1p(m)
        elif q == "recip":
            value, h = ex.expect_reciprocal(m), (lambda x: 1.0 / x)
        else:
            value = ex.frac_moment_general(m, args.rho) if args.rho > 1 else ex.frac_moment_01(m, args.rho)
            h = lambda x: x ** args.rho  # noqa: E731
    if not args.mc_check:
        _emit(out, ["quantity", "value"], [(q, value)])
        return
    if h is None:
        # variance: the same seeded draws centred at their own mean
        mean, _ = _mc(sampler, np.log1p, args)
        y_var, se = _mc(sampler, lambda x: (np.log1p(x) - mean) ** 2, args)
        _emit(out, ["quantity", "value", "mc_mean", "mc_se"], [(q, value, y_var, se)])
        return
    mean, se = _mc(sampler, h, args)
    _emit(out, ["quantity", "value", "mc_mean", "mc_se"], [(q, value, mean, se)])


def _holds(bound: float, direction: str, mean: float, se: float) -> str:
    slack = 3 * se + 1e-9 * (1 + abs(mean))
    ok = bound <= mean + slack if direction == "lower" else bound >= mean - slack
    return "true" if ok else "false"


def _second_moment(m: ex.MgfSpec) -> float:
    if m.moments is not None and len(m.moments) > 2:
        return m.moments[2]
    if m.var is None:
        raise ParseError("family lacks a second moment")
    return m.var + m.mean**2


def cmd_bounds(args, out: TextIO) -> None:
    kind = args.kind
    if kind == "rji":
        m = _family(args)
        f = ex.FnSpec.ln1p(args.gain) if args.f == "ln1p" else ex.FnSpec.power(args.power)
        bound = ex.rji_lower_bound(f, m, args.method)
        mean, se = _mc(m.sample, f.f, args)
        direction = "lower"
    elif kind == "iid":
        phi = ex.MgfSpec.bernoulli_sum(1, args.p)
        f = ex.FnSpec.ln1p(args.gain)
        bound = ex.rji_iid_bound(phi, args.count, f, args.eps)
        mean, se = _mc(ex.MgfSpec.bernoulli_sum(args.count, args.p).sample, f.f, args)
        direction = "lower"
    elif kind == "jensen-like-entropy":
        m = _family(args)
        bound, direction = ex.jensen_like_product(ex.FnSpec.neg_log(), _second_moment(m), m.mean)
        mean, se = _mc(m.sample, lambda x: -x * np.log(np.where(x > 0, x, 1.0)), args)
    elif kind == "jensen-like-moment":
        m = _family(args)
        s = args.power
        if 1 < s < 2:
            raise ParseError("the two-moment bound needs s outside (1, 2)")
        bound, direction = ex.jensen_like_product(ex.FnSpec.power(s - 1.0), _second_moment(m), m.mean)
        mean, se = _mc(m.sample, lambda x: x**s, args)
    elif kind == "capacity-second-moment":
        m = _family(args)
        bound = ex.capacity_second_moment_upper(args.gain, m.mean, _second_moment(m))
        mean, se = _mc(m.sample, lambda x: np.log1p(args.gain * x) ** 2, args)
        direction = "upper"
    else:
        means = _floats(args.means, "--means")
        bound = ex.harmonic_mean_upper(means)

        def sampler(rng, size):
            return rng.exponential(1.0, (size, means.size)) * means

        mean, se = _mc(sampler, lambda x: x.shape[1] / np.sum(1.0 / x, axis=1), args)
        direction = "upper"
    _emit(out, ["bound", "mc_mean", "mc_se", "direction", "holds"],
          [(bound, mean, se, direction, _holds(bound, direction, mean, se))])


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artifact", description=__doc__.split("\n")[0])
    parser.add_argument("--threads", type=int, default=None,
                        help=f"worker count (0 = one per CPU); default from {THREADS_ENV} or 1")
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("exponent", help="exponent-versus-rate sweep")
    pe.add_argument("quantity", choices=["rc", "rc-mmi", "sp", "ex", "cd", "sw"])
    pe.add_argument("--channel", help="dmc channel file")
    pe.add_argument("--bsc", type=float, help="binary symmetric channel crossover")
    pe.add_argument("--source", help="src joint-source file (sw)")
    pe.add_argument("--dsbs", type=float, help="doubly symmetric binary source crossover (sw)")
    pe.add_argument("--input", default="uniform", help="'uniform' or comma-separated input distribution")
    pe.add_argument("--rates", default="0:0.5:11", help="min:max:steps")
    pe.add_argument("--decoder", choices=["ml", "mmi"], default="ml")
    pe.add_argument("--method", choices=["primal", "dual", "grid"], default="primal")
    pe.add_argument("--denom", type=int, default=200, help="type denominator for --method grid")
    pe.add_argument("--bits", action="store_true", help="rates and exponents in bits")
    pe.set_defaults(func=cmd_exponent)

    pa = sub.add_parser("asymptotic", help="saddle-point estimate versus exact value")
    pa.add_argument("kind", choices=["stirling", "binom", "sphere", "tail", "lattice", "redundancy"])
    pa.add_argument("--n", required=True, help="comma-separated sizes")
    pa.add_argument("--k", type=int)
    pa.add_argument("--s", type=float, default=1.0)
    pa.add_argument("--bernoulli", type=float)
    pa.add_argument("--A", type=float)
    pa.add_argument("--delta", type=float, default=1.0)
    pa.add_argument("--Q", type=float, default=2.0)
    pa.add_argument("--n1", type=int)
    pa.set_defaults(func=cmd_asymptotic)

    px = sub.add_parser("expect", help="expectation via an integral representation")
    px.add_argument("quantity", choices=["ln", "ln1p", "var-ln1p", "recip", "frac", "lnfact", "guesswork", "simo",
                                         "simo-var", "cauchy"])
    _add_family_args(px)
    px.add_argument("--rho", type=float, default=0.5)
    px.add_argument("--dist")
    px.add_argument("--guess")
    px.add_argument("--snr", type=float, default=1.0)
    px.add_argument("--sigmas", default="1")
    px.add_argument("--dim", type=int, default=1, help="Cauchy dimension")
    px.add_argument("--mc-check", action="store_true")
    px.set_defaults(func=cmd_expect)

    pb = sub.add_parser("bounds", help="bound versus Monte-Carlo ground truth")
    pb.add_argument("kind", choices=["rji", "iid", "jensen-like-entropy", "jensen-like-moment",
                                     "capacity-second-moment", "harmonic"])
    _add_family_args(pb)
    pb.add_argument("--f", choices=["ln1p", "power"], default="ln1p")
    pb.add_argument("--gain", type=float, default=1.0)
    pb.add_argument("--power", type=float, default=0.5)
    pb.add_argument("--method", choices=["exact-q", "chernoff", "chernoff-tilde", "cheb-cantelli", "best"],
                    default="best")
    pb.add_argument("--eps", type=float, default=0.05)
    pb.add_argument("--means", default="1,2")
    pb.set_defaults(func=cmd_bounds)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    """Run the tool; returns the process exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        args.func(args, out)
    except ParseError as e:
        err.write(f"artifact: error: {e}\n")
        return 2
    except (ExponentSolverError, ex.QuadratureError) as e:
        err.write(f"artifact: solver failure: {e}\n")
        return 3
    except (ValueError, OverflowError) as e:
        err.write(f"artifact: error: {e}\n")
        return 2
    return 0


def main_entry() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Experiment harness: instance generation, method dispatch, minimum-evaluation
search, noise trials and table rendering."""

from __future__ import annotations

import csv
import io
import json
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from math import comb
from typing import Callable, Sequence

import numpy as np

from . import lp, prony, sdp
from .core import BasePoint, EvaluationOracle, NamedInstance, NoiseModel, SparsePolynomial, bundled_instances
from .errors import InputError, InterpError, NotApplicableError
from .moments import IndexScheme, collect_moments, natural_indices
from .recover import decode_exponents, relative_error, same_support

HANKEL_PRONY = "hankel_prony"
TOEPLITZ_PRONY = "toeplitz_prony"
ADVANCED_H = "advanced_h"
ADVANCED_T = "advanced_t"
NAIVE_LP = "naive_lp"
RIGOROUS_LP = "rigorous_lp"
SUPERRES = "superres"
METHODS = (HANKEL_PRONY, TOEPLITZ_PRONY, ADVANCED_H, ADVANCED_T, NAIVE_LP, RIGOROUS_LP, SUPERRES)

METHOD_TITLES = {
    RIGOROUS_LP: "Rigorous LP",
    SUPERRES: "Super Resolution",
    TOEPLITZ_PRONY: "Toeplitz Prony",
    HANKEL_PRONY: "Hankel Prony",
    ADVANCED_T: "Advanced T. Prony",
    ADVANCED_H: "Advanced H. Prony",
    NAIVE_LP: "Naive LP",
}

# schemes each method reads when none is requested
DEFAULT_SCHEME = {
    HANKEL_PRONY: "a2",
    TOEPLITZ_PRONY: "a1",
    RIGOROUS_LP: "a1",
    SUPERRES: "a1",
    NAIVE_LP: "a2",
}

DEGREE_CAP = 12
RECOVERY_TOL = 1e-8
NOISE_AMPLITUDE = 0.1
NAIVE_BOX = (0.9, 1.1)

NOT_APPLICABLE = "N. A."
NOT_RECOVERED = "NotRecovered"
RECOVERED = "Recovered"


def thread_cap() -> int:
    """Worker count from ``INTERP_THREADS`` (default 1)."""
    raw = os.environ.get("INTERP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"INTERP_THREADS must be an integer, got {raw!r}") from None


def benchmark_instances() -> list[NamedInstance]:
    """The ten benchmark polynomials, in table order."""
    return [inst for inst in bundled_instances() if inst.name.startswith("p")]


def generate_instance(n: int, degree: int, terms: int, seed: int) -> SparsePolynomial:
    """Random polynomial with ``terms`` distinct exponents of degree at most ``degree``.

    Coefficients are uniform on ``[-10, 10]`` and redrawn while smaller than
    0.1 in absolute value.
    """
    if n < 1 or degree < 0 or terms < 1:
        raise InputError("need n >= 1, degree >= 0 and at least one term")
    total = comb(n + degree, n)
    if terms > total:
        raise InputError(f"{terms} terms requested but only {total} exponents have degree <= {degree}")
    rng = np.random.default_rng(seed)
    pool = natural_indices(n, degree)
    picks = rng.choice(total, size=terms, replace=False)
    coeffs = {}
    for k in sorted(picks):
        c = 0.0
        while abs(c) < 0.1:
            c = float(rng.uniform(-10.0, 10.0))
        coeffs[pool[k]] = c
    return SparsePolynomial(n, coeffs)


def base_point(g: SparsePolynomial, kind: str = "integer_angles", order: int | None = None) -> BasePoint:
    if kind == "integer_angles":
        return BasePoint.integer_angles(g.dimension)
    if kind == "roots_of_unity":
        if order is None:
            raise InputError("roots of unity need an order")
        return BasePoint.roots_of_unity(g.dimension, order)
    raise InputError(f"unknown base point kind {kind!r}")


@dataclass
class MethodRun:
    """One call of a method at one degree."""

    polynomial: SparsePolynomial
    evaluations: int


def run_method(method: str, oracle: EvaluationOracle, phi: BasePoint, degree: int | None,
               degree_bound: int, scheme: str | None = None, epsilon: float = 0.1,
               noisy: bool = False, sparsity: int | None = None,
               noise_scale: float = NOISE_AMPLITUDE) -> MethodRun:
    """Recover a polynomial with ``method`` from the oracle.

    ``degree`` is the evaluation degree (ignored by the advanced variants,
    which use ``sparsity`` instead). With ``noisy`` set, the programs use
    their relaxed constraints and decoding snaps to the nearest grid entry.

    Raises:
        NotApplicableError: if a size guard refuses the instance.
        InterpError: on any other failure of the method.
    """
    if method not in METHODS:
        raise InputError(f"unknown method {method!r}")
    n = oracle.dimension
    cfg = prony.PronyConfig(rank_threshold=epsilon)
    kind = scheme or DEFAULT_SCHEME.get(method)
    if method in (ADVANCED_H, ADVANCED_T):
        if sparsity is None:
            raise InputError("the advanced variants need the number of terms")
        variant = prony.HANKEL if method == ADVANCED_H else prony.TOEPLITZ
        mu = prony.advanced_prony(oracle, phi, sparsity, variant, cfg)
        g_hat = decode_exponents(mu, phi, degree_bound, nearest=noisy)
        return MethodRun(g_hat, oracle.evaluations)
    if degree is None:
        raise InputError(f"{method} needs an evaluation degree")
    if method == NAIVE_LP:
        points = [phi.power(a).real for a in natural_indices(n, degree)]
        g_hat = lp.naive_lp(oracle, points, degree_bound)
        return MethodRun(g_hat, oracle.evaluations)
    if method == SUPERRES:
        ball = noise_scale * np.sqrt(2.0) if noisy else None
        mu, _ = sdp.relaxation_step(oracle, phi, kind, degree, ball, cfg)
        return MethodRun(decode_exponents(mu, phi, degree_bound, nearest=noisy), oracle.evaluations)
    seq = collect_moments(oracle, phi, IndexScheme(kind, degree, n))
    if method == RIGOROUS_LP:
        g_hat = lp.rigorous_lp(seq, phi, degree_bound, noise_box=noise_scale if noisy else None)
        return MethodRun(g_hat, oracle.evaluations)
    if method == HANKEL_PRONY:
        mu = prony.hankel_prony(seq, degree, cfg)
    else:
        mu = prony.toeplitz_prony(seq, degree, cfg)
    return MethodRun(decode_exponents(mu, phi, degree_bound, nearest=noisy), oracle.evaluations)


def _real_box_point(n: int) -> BasePoint:
    # distinct reals near 1 keep the naive LP's monomial columns well scaled
    return BasePoint.real_box(np.linspace(NAIVE_BOX[0], NAIVE_BOX[1], n + 2)[1:-1])


def default_base_point(method: str, g: SparsePolynomial) -> BasePoint:
    if method == NAIVE_LP:
        return _real_box_point(g.dimension)
    return BasePoint.integer_angles(g.dimension)


def recovered(g_hat: SparsePolynomial, g: SparsePolynomial, tol: float = RECOVERY_TOL) -> bool:
    """Same support and relative coefficient error at most ``tol`` (not percent)."""
    return same_support(g_hat, g) and relative_error(g_hat, g) <= 100.0 * tol


@dataclass
class MinEvalResult:
    """Outcome of :func:`find_min_evaluations`.

    ``status`` is ``"Recovered"``, ``"N. A."`` or ``"NotRecovered"``;
    ``degree`` is ``None`` for the advanced variants.
    """

    method: str
    status: str
    evaluations: int | None = None
    degree: int | None = None

    def cell(self) -> str:
        if self.status == NOT_APPLICABLE:
            return NOT_APPLICABLE
        if self.status != RECOVERED:
            return "-"
        if self.degree is None:
            return str(self.evaluations)
        return f"{self.evaluations} ({self.degree})"

    def __iter__(self):
        return iter((self.evaluations, self.degree))


def find_min_evaluations(g: SparsePolynomial, method: str, scheme: str | None = None,
                         phi: BasePoint | None = None, degree_bound: int = 10,
                         cap: int = DEGREE_CAP, epsilon: float = 0.1) -> MinEvalResult:
    """Smallest degree at which ``method`` returns exactly ``g`` from noiseless data.

    Degrees are scanned from 0. Each degree uses a fresh oracle, so the
    evaluation count is the number of distinct points needed at that degree.
    A size guard reports ``"N. A."``; reaching ``cap`` reports
    ``"NotRecovered"``.
    """
    phi = phi or default_base_point(method, g)
    if method in (ADVANCED_H, ADVANCED_T):
        oracle = EvaluationOracle(g)
        try:
            run = run_method(method, oracle, phi, None, degree_bound, epsilon=epsilon, sparsity=g.sparsity)
        except NotApplicableError:
            return MinEvalResult(method, NOT_APPLICABLE)
        except InterpError:
            return MinEvalResult(method, NOT_RECOVERED, oracle.evaluations)
        ok = recovered(run.polynomial, g)
        return MinEvalResult(method, RECOVERED if ok else NOT_RECOVERED, run.evaluations)
    for d in range(cap + 1):
        oracle = EvaluationOracle(g)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                run = run_method(method, oracle, phi, d, degree_bound, scheme, epsilon)
        except NotApplicableError:
            return MinEvalResult(method, NOT_APPLICABLE)
        except InterpError:
            continue
        if recovered(run.polynomial, g):
            return MinEvalResult(method, RECOVERED, run.evaluations, d)
    return MinEvalResult(method, NOT_RECOVERED)


@dataclass
class NoiseSummary:
    """Relative errors (percent) of one method over the noise trials."""

    method: str
    degree: int | None
    errors: list[float]

    @property
    def mean(self) -> float:
        return float(np.mean(self.errors)) if self.errors else float("nan")

    @property
    def std(self) -> float:
        return float(np.std(self.errors)) if self.errors else float("nan")

    def cell(self) -> str:
        return f"{self.mean:.2f}%"


def noise_degree(g: SparsePolynomial, methods: Sequence[str], scheme: str | None = None,
                 degree_bound: int = 10) -> int:
    """Largest noiseless minimal degree among ``methods`` (the trial degree)."""
    degrees = []
    for m in methods:
        if m in (ADVANCED_H, ADVANCED_T):
            continue
        res = find_min_evaluations(g, m, scheme, degree_bound=degree_bound)
        if res.status == RECOVERED:
            degrees.append(res.degree)
    if not degrees:
        raise InputError("no method recovers the instance without noise")
    return max(degrees)


def _trial(g, method, phi, degree, degree_bound, scheme, epsilon, amplitude, seed):
    oracle = EvaluationOracle(g, NoiseModel(amplitude, seed))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            run = run_method(method, oracle, phi, degree, degree_bound, scheme, epsilon,
                             noisy=amplitude > 0, sparsity=g.sparsity, noise_scale=amplitude)
        return relative_error(run.polynomial, g)
    except InterpError:
        # a failed trial counts as recovering nothing
        return relative_error(SparsePolynomial(g.dimension, {}), g)


def noise_trial_suite(g: SparsePolynomial, methods: Sequence[str], d_max: int, trials: int = 10,
                      seed: int = 0, amplitude: float = NOISE_AMPLITUDE, epsilon: float = 0.1,
                      scheme: str | None = None, degree_bound: int = 10,
                      phi: BasePoint | None = None) -> list[NoiseSummary]:
    """Mean relative error per method under fresh uniform noise in every trial.

    Trial ``t`` draws its noise from seed ``seed + t``. The LP relaxes each
    real and imaginary residual to ``amplitude``, super-resolution uses a
    Euclidean ball of radius ``amplitude * sqrt(2)`` and the Prony variants
    use the raw data.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    out = []
    for method in methods:
        point = phi or default_base_point(method, g)
        args = [(g, method, point, d_max, degree_bound, scheme, epsilon, amplitude, seed + t)
                for t in range(trials)]
        workers = min(thread_cap(), trials)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                errors = list(pool.map(lambda a: _trial(*a), args))
        else:
            errors = [_trial(*a) for a in args]
        out.append(NoiseSummary(method, d_max, errors))
    return out


@dataclass
class TableRow:
    blackbox: str
    cells: dict[str, str]


def emit_table(rows: Sequence[TableRow], methods: Sequence[str], fmt: str = "markdown") -> str:
    """Render rows with one column per method, in the given method order."""
    header = ["Blackbox"] + [METHOD_TITLES.get(m, m) for m in methods]
    body = [[r.blackbox] + [r.cells.get(m, "") for m in methods] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(body)
        return buf.getvalue()
    if fmt != "markdown":
        raise InputError(f"unknown table format {fmt!r}")
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in body]
    return "\n".join(lines) + "\n"


@dataclass
class ExperimentConfig:
    """Settings for :func:`run_experiment`.

    Attributes:
        methods: Methods to run, in column order.
        scheme: Index scheme kind for the scheme-based methods (``None`` keeps
            each method's default).
        phi: ``"integer_angles"`` or ``"roots_of_unity"``.
        order: Root-of-unity order when ``phi`` is ``"roots_of_unity"``.
        degree: Fixed degree, or ``None`` to search for the minimal one.
        noise: Noise amplitude, or ``None`` for noiseless runs.
        trials: Noise trials per method.
        rank_threshold: Singular-value ratio for the Prony rank cut.
        output: ``"markdown"`` or ``"csv"``.
        seed: Base seed for noise trials.
        instances: Names of bundled instances to run.
        degree_bound: Per-coordinate exponent bound used for decoding.
    """

    methods: list[str] = field(default_factory=lambda: [RIGOROUS_LP, SUPERRES, TOEPLITZ_PRONY])
    scheme: str | None = None
    phi: str = "integer_angles"
    order: int | None = None
    degree: int | None = None
    noise: float | None = None
    trials: int = 10
    rank_threshold: float = 0.1
    output: str = "markdown"
    seed: int = 0
    instances: list[str] = field(default_factory=lambda: [i.name for i in benchmark_instances()])
    degree_bound: int = 10

    def __post_init__(self):
        if self.trials < 1:
            raise InputError("trials must be at least 1")
        for m in self.methods:
            if m not in METHODS:
                raise InputError(f"unknown method {m!r}")

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        data = json.loads(text)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def run_experiment(cfg: ExperimentConfig, progress: Callable[[str], None] | None = None) -> str:
    """Run every configured instance and render the result table."""
    by_name = {inst.name: inst for inst in bundled_instances()}
    rows = []
    for name in cfg.instances:
        if name not in by_name:
            raise InputError(f"unknown instance {name!r}")
        inst = by_name[name]
        g = inst.polynomial
        phi = None if cfg.phi == "integer_angles" else base_point(g, cfg.phi, cfg.order)
        cells = {}
        if cfg.noise is None:
            for m in cfg.methods:
                if cfg.degree is None:
                    res = find_min_evaluations(g, m, cfg.scheme, phi, inst.degree_bound,
                                               epsilon=cfg.rank_threshold)
                    cells[m] = res.cell()
                else:
                    cells[m] = _fixed_degree_cell(g, m, cfg, phi, inst.degree_bound)
        else:
            d = cfg.degree if cfg.degree is not None else noise_degree(g, cfg.methods, cfg.scheme, inst.degree_bound)
            for s in noise_trial_suite(g, cfg.methods, d, cfg.trials, cfg.seed, cfg.noise,
                                       cfg.rank_threshold, cfg.scheme, inst.degree_bound, phi):
                cells[s.method] = s.cell()
        rows.append(TableRow(str(g), cells))
        if progress is not None:
            progress(name)
    return emit_table(rows, cfg.methods, cfg.output)


def _fixed_degree_cell(g, method, cfg, phi, degree_bound) -> str:
    oracle = EvaluationOracle(g)
    point = phi or default_base_point(method, g)
    try:
        run = run_method(method, oracle, point, cfg.degree, degree_bound, cfg.scheme,
                         cfg.rank_threshold, sparsity=g.sparsity)
    except NotApplicableError:
        return NOT_APPLICABLE
    except InterpError:
        return "-"
    err = relative_error(run.polynomial, g)
    return f"{run.evaluations} ({cfg.degree}) {err:.2f}%"

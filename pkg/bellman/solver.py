"""Bellman operator, contraction certificates and value iteration."""

import logging
from dataclasses import dataclass, field

import numpy as np

from errors import InputError, NumericError, PreconditionError
from gauges import Certificate, Witness, make_gauge
from gauges.certify import BANACH_CONDITION, RHO_BELLMAN
from gauges.gauge import RHO_SECTION3
from utils import AXIOM_TOL, DEFAULT_SEED

from .aggregator import AffineAggregator, ConstantAggregator, TabulatedAggregator
from .problem import BellmanProblem, ValueFunction, as_values

logger = logging.getLogger(__name__)

STRICT_RHO = "strict-rho"
BANACH_BETA = "banach-beta"

DEGENERACY_NOTE = (
    "the rho bound for all bounded h, k forces Im to be constant in t: constants "
    "differing by eps < 1 give |Im(a) - Im(a + eps)| <= eps^2/2 for every eps"
)

# constant pair for the analytic affine witness
AFFINE_WITNESS_EPS = 0.1


def sup_metric(h, k) -> float:
    """d(h, k) = max over states of |h(x) - k(x)|."""
    a, b = as_values(h), as_values(k)
    if a.shape != b.shape:
        raise InputError(f"value functions differ in length: {a.size} vs {b.size}")
    return float(np.max(np.abs(a - b)))


def _aggregate(problem: BellmanProblem, values: np.ndarray) -> np.ndarray:
    agg = problem.aggregator.apply(values[problem.transition])
    bad = np.argwhere(~np.isfinite(agg))
    if len(bad):
        x, y = (int(i) for i in bad[0])
        raise NumericError(f"aggregator is not finite at state {x}, decision {y}", x, y)
    return agg


def bellman_operator(problem: BellmanProblem, h) -> ValueFunction:
    """T(h)(x) = max over decisions y of f(x, y) + Im(x, y, h(eta(x, y)))."""
    values = as_values(h)
    if values.size != problem.n_states:
        raise InputError(f"value function has {values.size} entries, problem has {problem.n_states} states")
    q = problem.reward + _aggregate(problem, values)
    bad = np.argwhere(~np.isfinite(q))
    if len(bad):
        x, y = (int(i) for i in bad[0])
        raise NumericError(f"Bellman term is not finite at state {x}, decision {y}", x, y)
    return ValueFunction(q.max(axis=1))


@dataclass
class BellmanCertificate:
    strict_rho: Certificate
    banach_beta: Certificate
    beta: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def certified(self) -> str | None:
        if self.strict_rho.passed:
            return STRICT_RHO
        if self.banach_beta.passed:
            return BANACH_BETA
        return None

    @property
    def passed(self) -> bool:
        return self.certified is not None

    def to_dict(self):
        return {
            "certified": self.certified,
            "beta": self.beta,
            "strict_rho": self.strict_rho.to_dict(),
            "banach_beta": self.banach_beta.to_dict(),
            "notes": self.notes,
        }


@dataclass
class SolveTrace:
    deltas: list[float] = field(default_factory=list)
    residual: float | None = None
    iterations: int = 0
    converged: bool = False
    beta: float | None = None
    residual_bound: float | None = None

    def to_dict(self):
        return {
            "deltas": self.deltas,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "beta": self.beta,
            "residual_bound": self.residual_bound,
        }


def _sample_pairs(rng: np.random.Generator, n: int, count: int):
    """Alternate constant pairs with random pairs, offsets spread over [1e-3, 10]."""
    for s in range(count):
        scale = 10.0 ** rng.uniform(-3.0, 1.0)
        if s % 2 == 0:
            c = rng.uniform(-1.0, 1.0)
            yield np.full(n, c), np.full(n, c + scale)
        else:
            h = rng.uniform(-1.0, 1.0, size=n)
            yield h, h + scale * rng.uniform(-1.0, 1.0, size=n)


def _pair_witness(problem, h, k, diff, bound, d) -> Witness | None:
    bad = np.argwhere(diff > bound)
    if not len(bad):
        return None
    x, y = (int(i) for i in bad[0])
    return Witness(
        points=(x, y),
        lhs=float(diff[x, y]),
        rhs=float(bound),
        data={"h": h.tolist(), "k": k.tolist(), "d": d},
    )


def _affine_rho_witness(problem: BellmanProblem, beta: float) -> Witness:
    eps = min(AFFINE_WITNESS_EPS, abs(beta))
    h = np.zeros(problem.n_states)
    k = np.full(problem.n_states, eps)
    diff = np.abs(_aggregate(problem, h) - _aggregate(problem, k))
    return Witness(
        points=(0, 0),
        lhs=float(diff[0, 0]),
        rhs=0.5 * eps * eps,
        data={"h": h.tolist(), "k": k.tolist(), "d": eps},
    )


def _banach_gauge_desc(beta: float) -> dict:
    return {"kind": "banach", "params": {"alpha": beta}}


def _tabulated_witness(agg: TabulatedAggregator) -> Witness:
    x, y, i = agg.steepest_segment()
    a, b = agg.ts[i], agg.ts[i + 1]
    lhs = abs(agg.values[x, y, i + 1] - agg.values[x, y, i])
    return Witness(points=(x, y), lhs=float(lhs), rhs=float(b - a), data={"a": float(a), "b": float(b)})


def certify_bellman(
    problem: BellmanProblem, sample_count: int = 256, seed: int = DEFAULT_SEED
) -> BellmanCertificate:
    """Certify the aggregator against the rho bound and, failing that, a Banach bound.

    Both checks scan the same seeded sample of value-function pairs at
    every (state, decision). Affine aggregators are also decided
    analytically: strict-rho holds iff beta = 0.
    """
    if sample_count < 1:
        raise InputError(f"sample_count must be at least 1, got {sample_count}")
    rng = np.random.default_rng(seed)
    agg = problem.aggregator
    rho = make_gauge(RHO_SECTION3)
    beta = float(agg.lipschitz())

    strict = Certificate(RHO_BELLMAN, False, gauge=rho.describe(), map_name="bellman")
    banach = Certificate(BANACH_CONDITION, False, gauge=_banach_gauge_desc(beta), map_name="bellman")
    pairs_per_sample = problem.n_states * problem.n_decisions

    for h, k in _sample_pairs(rng, problem.n_states, sample_count):
        d = sup_metric(h, k)
        if d == 0.0:
            continue
        diff = np.abs(_aggregate(problem, h) - _aggregate(problem, k))
        if strict.witness is None:
            strict.witness = _pair_witness(problem, h, k, diff, float(rho(d)), d)
            strict.pairs_checked += pairs_per_sample
        if banach.witness is None:
            banach.witness = _pair_witness(problem, h, k, diff, beta * d + AXIOM_TOL, d)
            banach.pairs_checked += pairs_per_sample

    if isinstance(agg, AffineAggregator) and agg.beta != 0.0 and strict.witness is None:
        strict.witness = _affine_rho_witness(problem, agg.beta)
    if beta >= 1.0 and banach.witness is None:
        banach.witness = (
            _tabulated_witness(agg)
            if isinstance(agg, TabulatedAggregator)
            else Witness(failed_property="beta<1", data={"beta": beta})
        )
    strict.passed = strict.witness is None
    banach.passed = banach.witness is None

    cert = BellmanCertificate(strict, banach, beta=beta if banach.passed else None, notes=[DEGENERACY_NOTE])
    if strict.passed and not isinstance(agg, ConstantAggregator):
        cert.notes.append(f"strict-rho held on {sample_count} samples only")
    logger.debug("bellman certificate: %s (beta=%s)", cert.certified, cert.beta)
    return cert


def recheck_bellman_witness(problem: BellmanProblem, cert: Certificate) -> bool:
    """Re-evaluate a failing rho-bellman or banach certificate at its witness pair."""
    w = cert.witness
    if cert.passed or w is None:
        return False
    if "h" not in w.data:
        return w.failed_property == "beta<1" or w.lhs >= w.rhs
    h, k = np.array(w.data["h"]), np.array(w.data["k"])
    x, y = w.points
    d = sup_metric(h, k)
    diff = abs(_aggregate(problem, h)[x, y] - _aggregate(problem, k)[x, y])
    if cert.condition == RHO_BELLMAN:
        return bool(diff > float(make_gauge(RHO_SECTION3)(d)))
    return bool(diff > cert.gauge["params"]["alpha"] * d + AXIOM_TOL)


def solve_bellman(
    problem: BellmanProblem,
    h0,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    certificate: BellmanCertificate | None = None,
) -> tuple[ValueFunction, SolveTrace]:
    """Value iteration h_{n+1} = T(h_n) until successive values are within tol.

    An uncertified certificate is refused. The residual d(h*, T h*) is
    recomputed after the loop; with a Banach factor beta the trace also
    carries the bound tol (1 + beta) / (1 - beta) it must respect.
    """
    if not tol > 0.0:
        raise InputError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise InputError(f"max_iter must be at least 1, got {max_iter}")
    if certificate is not None and not certificate.passed:
        raise PreconditionError("Bellman problem is not certified (neither strict-rho nor banach-beta)")

    beta = certificate.beta if certificate is not None else None
    if beta is None and problem.aggregator.lipschitz() < 1.0:
        beta = float(problem.aggregator.lipschitz())

    h = ValueFunction(as_values(h0))
    if len(h) != problem.n_states:
        raise InputError(f"h0 has {len(h)} entries, problem has {problem.n_states} states")
    trace = SolveTrace(beta=beta)
    for _ in range(max_iter):
        nxt = bellman_operator(problem, h)
        delta = sup_metric(nxt, h)
        trace.deltas.append(delta)
        h = nxt
        if delta <= tol:
            trace.converged = True
            break
    trace.iterations = len(trace.deltas)
    trace.residual = sup_metric(h, bellman_operator(problem, h))
    if trace.converged and beta is not None:
        trace.residual_bound = tol * (1.0 + beta) / (1.0 - beta)
    if trace.converged:
        logger.info("value iteration converged after %d iterations (residual %.3g)", trace.iterations, trace.residual)
    else:
        logger.warning("value iteration stopped at max_iter=%d with delta %.3g", max_iter, trace.deltas[-1])
    return h, trace

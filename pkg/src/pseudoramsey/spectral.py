"""Adjacency spectra, (n, d, lambda) certificates and the checks built on them.

All logarithms are natural. Bounds of the form ``X**t`` are handled as
``t * log(X)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import AdjacentPairError, NotRegularError, SizeLimitError
from .graph_core import Graph, VertexSet, degree_profile, iter_bits

DEFAULT_MAX_N = 500
DEFAULT_TOLERANCE = 1e-9


def adjacency_spectrum(g: Graph, max_n: int = DEFAULT_MAX_N) -> list[float]:
    """Eigenvalues of the adjacency matrix, sorted descending."""
    if g.n < 1:
        raise ValueError("spectrum of the empty vertex set is undefined")
    if g.n > max_n:
        raise SizeLimitError(f"n={g.n} exceeds eigensolver cap {max_n}")
    # LAPACK syevd: Householder tridiagonalisation + divide and conquer
    eig = np.linalg.eigvalsh(g.adjacency_matrix().astype(np.float64))
    return [float(x) for x in eig[::-1]]


@dataclass(frozen=True)
class SpectralCertificate:
    n: int
    d: int
    lam: float
    eigenvalues: tuple[float, ...]
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def ramanujan_ratio(self) -> float:
        """``lam / (2 sqrt(d - 1))``; reported only, never checked."""
        if self.d <= 1:
            return math.inf if self.lam > 0 else 0.0
        return self.lam / (2.0 * math.sqrt(self.d - 1))

    @property
    def spectral_ratio(self) -> float:
        return self.lam / self.d if self.d else math.inf


@dataclass(frozen=True)
class FamilySpec:
    """Descriptive metadata for a K_s-free family; nothing here is certified.

    ``alpha`` is the exponent with ``d ~ n**(1 - alpha)`` and
    ``lam ~ n**(1 - (s - 1) * alpha)``.
    """

    s: int
    alpha: float
    family_name: str

    def __post_init__(self) -> None:
        if self.s < 3:
            raise ValueError("forbidden clique size must be at least 3")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")

    @property
    def optimal_alpha(self) -> float:
        return 1.0 / (2 * self.s - 3)

    @property
    def exponent_conflict(self) -> bool:
        """True if alpha would force lam below sqrt(d), which no regular graph with d <= n/2 attains."""
        return self.alpha > self.optimal_alpha + 1e-12


def effective_alpha(n: int, d: int) -> float:
    """The exponent ``alpha`` solving ``d = n**(1 - alpha)`` for one graph."""
    if n <= 1 or d <= 0:
        return 1.0
    return max(min(1.0 - math.log(d) / math.log(n), 1.0), 1e-12)


def nontrivial_lambda(eigenvalues: Sequence[float]) -> float:
    """Largest absolute eigenvalue after removing one copy of the top eigenvalue."""
    if len(eigenvalues) <= 1:
        return 0.0
    rest = eigenvalues[1:]
    return max(abs(rest[0]), abs(rest[-1]))


def ndl_certify(
    g: Graph, tolerance: float = DEFAULT_TOLERANCE, max_n: int = DEFAULT_MAX_N
) -> SpectralCertificate:
    regular, d = degree_profile(g)
    if not regular:
        raise NotRegularError(f"graph {g.label or '<unnamed>'} is not regular")
    eig = adjacency_spectrum(g, max_n)
    if abs(eig[0] - d) > tolerance * max(1, d) * g.n:
        raise ArithmeticError(f"top eigenvalue {eig[0]} disagrees with degree {d}")
    lam = min(nontrivial_lambda(eig), float(d))
    return SpectralCertificate(n=g.n, d=d, lam=lam, eigenvalues=tuple(eig), tolerance=tolerance)


class MixingCheck(NamedTuple):
    e_st: int
    predicted: float
    residual: float
    passes: bool


def expander_mixing_check(
    g: Graph, cert: SpectralCertificate, s: VertexSet, t: VertexSet
) -> MixingCheck:
    """Compare ``e(S, T)`` (ordered pairs) with ``d |S||T| / n``."""
    if not s.size or not t.size:
        raise ValueError("S and T must be nonempty")
    if not (s.within(g.n) and t.within(g.n)):
        raise ValueError("vertex sets must lie in [0, n)")
    e_st = sum((g.rows[u] & t.members).bit_count() for u in s)
    predicted = cert.d * s.size * t.size / cert.n
    residual = abs(e_st - predicted)
    limit = cert.lam * math.sqrt(s.size * t.size)
    return MixingCheck(e_st, predicted, residual, residual < limit + cert.tolerance)


class LogBound(NamedTuple):
    log_bound: float
    precondition_met: bool
    threshold: float


def ar_threshold(n: int, d: int) -> float:
    """Smallest admissible tuple length ``2 n (ln n)^2 / d``."""
    if d <= 0:
        return math.inf
    return 2.0 * n * math.log(n) ** 2 / d


def ar_bound(cert: SpectralCertificate, t: int) -> LogBound:
    """``t * ln(4 e n lam / d)`` with the tuple-length precondition flag."""
    if t < 1:
        raise ValueError("t must be at least 1")
    threshold = ar_threshold(cert.n, cert.d)
    if cert.d <= 0 or cert.lam <= 0:
        log_bound = -math.inf if cert.d > 0 else math.inf
    else:
        log_bound = t * math.log(4.0 * math.e * cert.n * cert.lam / cert.d)
    return LogBound(log_bound, t >= threshold, threshold)


@dataclass(frozen=True)
class ARTraceReport:
    sequence: tuple[int, ...]
    sk_sizes: tuple[int, ...]
    tk_sizes: tuple[int, ...]
    shrink_steps: int
    tprime_bound: float
    tk_limit: float
    violations: tuple[int, ...]

    @property
    def ok(self) -> bool:
        if self.violations:
            return False
        return math.isinf(self.tprime_bound) or self.shrink_steps <= math.ceil(self.tprime_bound)


def ar_trace(g: Graph, cert: SpectralCertificate, sequence: Sequence[int]) -> ARTraceReport:
    """Replay the candidate-pool bookkeeping for a pairwise nonadjacent sequence.

    ``S_k`` holds every vertex with no edge to ``v_1..v_{k-1}`` (previous picks
    included); ``T_k`` is the part of ``S_k`` whose choice barely shrinks it.
    Steps in ``violations`` have ``|T_k| >= 2 n lam / d``.
    """
    seq = tuple(int(v) for v in sequence)
    for i, u in enumerate(seq):
        if not 0 <= u < g.n:
            raise ValueError(f"vertex {u} out of range")
        for v in seq[:i]:
            if g.has_edge(u, v):
                raise AdjacentPairError(v, u)
    n, d = cert.n, cert.d
    frac = d / (2 * n)
    tk_limit = 2 * n * cert.lam / d if d else math.inf
    tprime = (2 * n / d) * math.log(n) if d else math.inf

    pool = g.vertex_mask
    sk_sizes, tk_sizes, violations = [], [], []
    shrink = 0
    for k, v in enumerate(seq):
        size = pool.bit_count()
        cutoff = frac * size
        tk = 0
        for w in iter_bits(pool):
            if (g.rows[w] & pool).bit_count() < cutoff:
                tk |= 1 << w
        sk_sizes.append(size)
        tk_sizes.append(tk.bit_count())
        if tk.bit_count() >= tk_limit:
            violations.append(k)
        if not (tk >> v) & 1:
            shrink += 1
        pool &= ~g.rows[v]
    return ARTraceReport(
        sequence=seq,
        sk_sizes=tuple(sk_sizes),
        tk_sizes=tuple(tk_sizes),
        shrink_steps=shrink,
        tprime_bound=tprime,
        tk_limit=tk_limit,
        violations=tuple(violations),
    )

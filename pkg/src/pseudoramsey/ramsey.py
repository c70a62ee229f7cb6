"""Multicolor overlay construction, witness verification and bound accounting.

Colors are 1-based. Colors ``1..k`` come from randomly relabelled blowups of
K_{s_i}-free source graphs; every pair covered by none of them gets color
``k + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .constructions import BlowupMap, even_blowup, random_blowup
from .errors import MalformedColoringError, SizeMismatchError
from .graph_core import (
    Graph,
    clique_number,
    complement,
    count_independent_tuples,
    find_clique,
    independence_polynomial,
    iter_bits,
)
from .seeding import check_seed, derive_seed, permutation_from_seed
from .spectral import SpectralCertificate, ar_threshold

TIE_RULES = ("lowest", "highest")
MODES = ("identity", "random")


@dataclass(frozen=True)
class RamseyInstance:
    s: tuple[int, ...]
    t: int
    N: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", tuple(int(x) for x in self.s))
        if any(x < 3 for x in self.s):
            raise ValueError("every s_i must be at least 3")
        if self.t < 2:
            raise ValueError("t must be at least 2")
        if self.N < 1:
            raise ValueError("N must be at least 1")

    @property
    def k(self) -> int:
        return len(self.s)

    @property
    def S_sum(self) -> int:
        return sum(x - 2 for x in self.s)

    def thresholds(self) -> tuple[int, ...]:
        """Forbidden clique size per color, last color included."""
        return self.s + (self.t,)


class ColoredGraph:
    """A (k+1)-edge-coloring of K_n held as a symmetric uint8 matrix (diagonal 0)."""

    __slots__ = ("n", "k", "_colors")

    def __init__(self, colors: np.ndarray, k: int):
        a = np.array(colors, dtype=np.uint8)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise MalformedColoringError("color matrix must be square")
        n = a.shape[0]
        if not np.array_equal(a, a.T):
            raise MalformedColoringError("coloring is not symmetric")
        if np.any(np.diag(a) != 0):
            raise MalformedColoringError("diagonal entries must be 0")
        off = a[~np.eye(n, dtype=bool)]
        if off.size and (off.min() < 1 or off.max() > k + 1):
            raise MalformedColoringError(f"colors must lie in 1..{k + 1}")
        a.setflags(write=False)
        self.n = n
        self.k = k
        self._colors = a

    @property
    def matrix(self) -> np.ndarray:
        return self._colors

    def color(self, u: int, v: int) -> int:
        return int(self._colors[u, v])

    def class_graph(self, i: int) -> Graph:
        return Graph.from_adjacency(self._colors == i, f"color{i}")

    def union_graph(self) -> Graph:
        """Spanning subgraph formed by colors ``1..k``."""
        m = (self._colors >= 1) & (self._colors <= self.k)
        return Graph.from_adjacency(m, "T")

    def relabel(self, perm: Sequence[int]) -> "ColoredGraph":
        """Coloring with vertex ``perm[u]`` playing the role of ``u``."""
        p = np.asarray(perm)
        out = np.zeros_like(self._colors)
        out[np.ix_(p, p)] = self._colors
        return ColoredGraph(out, self.k)

    def upper_rows(self) -> list[list[int]]:
        return [[int(x) for x in self._colors[u, u + 1 :]] for u in range(self.n - 1)]

    @classmethod
    def from_upper_rows(cls, n: int, k: int, rows: Sequence[Sequence[int]]) -> "ColoredGraph":
        if n and len(rows) != n - 1:
            raise MalformedColoringError(f"expected {n - 1} rows, got {len(rows)}")
        a = np.zeros((n, n), dtype=np.uint8)
        for u, row in enumerate(rows):
            if len(row) != n - u - 1:
                raise MalformedColoringError(f"row {u} has length {len(row)}, expected {n - u - 1}")
            a[u, u + 1 :] = row
        return cls(a + a.T, k)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColoredGraph):
            return NotImplemented
        return self.k == other.k and np.array_equal(self._colors, other._colors)

    def __repr__(self) -> str:
        return f"ColoredGraph(n={self.n}, k={self.k})"


def overlay_coloring(
    blown: Sequence[Graph],
    perms: Sequence[Sequence[int]] | None = None,
    tie_rule: str = "lowest",
) -> ColoredGraph:
    """Color ``uv`` with ``i`` when ``perm_i(u) perm_i(v)`` is an edge of ``blown[i]``.

    Pairs claimed by several colors go to the lowest (or highest) index; pairs
    claimed by none get color ``k + 1``.
    """
    k = len(blown)
    if tie_rule not in TIE_RULES:
        raise ValueError(f"unknown tie rule {tie_rule!r}")
    if k == 0:
        raise ValueError("need at least one graph to overlay")
    N = blown[0].n
    if any(g.n != N for g in blown):
        raise SizeMismatchError("all overlaid graphs must have the same vertex count")
    if perms is None:
        perms = [list(range(N))] * k
    if len(perms) != k:
        raise SizeMismatchError("need one permutation per graph")
    colors = np.full((N, N), k + 1, dtype=np.uint8)
    order = range(k - 1, -1, -1) if tie_rule == "lowest" else range(k)
    for i in order:
        p = np.asarray(perms[i], dtype=np.int64)
        if sorted(p.tolist()) != list(range(N)):
            raise ValueError(f"permutation {i} is not a permutation of range({N})")
        a = blown[i].adjacency_matrix().astype(bool)
        colors[a[np.ix_(p, p)]] = i + 1
    np.fill_diagonal(colors, 0)
    return ColoredGraph(colors, k)


@dataclass(frozen=True)
class ColorVerdict:
    color: int
    forbidden: int
    free: bool
    clique: tuple[int, ...] | None


@dataclass(frozen=True)
class TrialRecipe:
    """Everything needed to regenerate one certify trial from its source graphs."""

    mode: str
    N: int
    tie_rule: str
    trial: int
    master_seed: int | None
    blowup_seeds: tuple[int, ...] | None
    perm_seeds: tuple[int, ...] | None


@dataclass(frozen=True)
class RamseyWitness:
    instance: RamseyInstance
    coloring: ColoredGraph
    verdicts: tuple[ColorVerdict, ...]
    recipe: TrialRecipe | None = None
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def valid(self) -> bool:
        return all(v.free for v in self.verdicts)


def verify_witness(
    c: ColoredGraph, inst: RamseyInstance, node_budget: int | None = None
) -> RamseyWitness:
    """Exact check that color ``i`` has no K_{s_i} and color ``k+1`` no K_t."""
    if c.n != inst.N:
        raise MalformedColoringError(f"coloring has {c.n} vertices, instance expects {inst.N}")
    if c.k != inst.k:
        raise MalformedColoringError(f"coloring has {c.k + 1} colors, instance expects {inst.k + 1}")
    verdicts = []
    for i, s in enumerate(inst.s, start=1):
        found = find_clique(c.class_graph(i), s, node_budget)
        verdicts.append(ColorVerdict(i, s, found is None, None if found is None else tuple(found)))
    # a K_t in the last color is an independent t-set of the union T
    found = find_clique(complement(c.union_graph()), inst.t, node_budget)
    verdicts.append(
        ColorVerdict(inst.k + 1, inst.t, found is None, None if found is None else tuple(found))
    )
    return RamseyWitness(inst, c, tuple(verdicts))


def expected_it_blowup(g: Graph, N: int, t: int) -> Fraction:
    """Exact ``E[i_t(G(N))]`` over uniform random maps ``[N] -> V(g)``."""
    if t > N:
        raise ValueError("t must not exceed N")
    report = count_independent_tuples(g, t)
    return Fraction(math.comb(N, t) * report.exact_count, g.n**t)


class BlowupTupleBound(NamedTuple):
    log_bound: float
    precondition_met: bool
    degenerate: bool
    threshold: float


def lemma5_bound(cert: SpectralCertificate, N: int, t: int) -> BlowupTupleBound:
    """``t * ln(2 e^2 lam N / (n ln(n)^2))`` and whether ``t >= 2 n ln(n)^2 / d``."""
    if t < 1:
        raise ValueError("t must be at least 1")
    threshold = ar_threshold(cert.n, cert.d)
    met = t >= threshold
    denom = cert.n * math.log(cert.n) ** 2 if cert.n > 1 else 0.0
    if cert.lam <= 0 or denom <= 0:
        return BlowupTupleBound(-math.inf if denom > 0 else math.inf, met, True, threshold)
    value = t * math.log(2 * math.e**2 * cert.lam * N / denom)
    return BlowupTupleBound(value, met, False, threshold)


def log_comb(N: int, t: int) -> float:
    return math.log(math.comb(N, t))


@dataclass(frozen=True)
class UnionBoundReport:
    log_value: float
    per_color_log_bound: tuple[float, ...]
    preconditions: tuple[bool, ...]

    @property
    def predicts_witness(self) -> bool:
        return self.log_value < 0

    @property
    def rigorous(self) -> bool:
        return all(self.preconditions)


def union_bound_report(certs: Sequence[SpectralCertificate], inst: RamseyInstance) -> UnionBoundReport:
    """Log of ``C(N,t) * prod_i bound_i / C(N,t)**k`` from the per-color blowup bounds.

    Negative means the bound predicts a valid coloring exists at these parameters.
    """
    if len(certs) != inst.k:
        raise SizeMismatchError(f"need {inst.k} certificates, got {len(certs)}")
    lc = log_comb(inst.N, inst.t)
    bounds = [lemma5_bound(c, inst.N, inst.t) for c in certs]
    total = lc + sum(b.log_bound - lc for b in bounds)
    return UnionBoundReport(
        log_value=total,
        per_color_log_bound=tuple(b.log_bound for b in bounds),
        preconditions=tuple(b.precondition_met for b in bounds),
    )


def expected_bad_sets(sources: Sequence[Graph], inst: RamseyInstance) -> Fraction:
    """Exact expected number of t-sets monochromatic in the last color.

    Under independent random blowups and permutations a fixed t-set avoids
    color i with probability ``count_i / n_i**t``, the exact independent-tuple
    ratio; ties do not affect the last color.
    """
    if len(sources) != inst.k:
        raise SizeMismatchError(f"need {inst.k} source graphs, got {len(sources)}")
    value = Fraction(math.comb(inst.N, inst.t))
    for g in sources:
        value *= Fraction(count_independent_tuples(g, inst.t).exact_count, g.n**inst.t)
    return value


class UpperAudit(NamedTuple):
    D: int
    D_prime: int
    greedy_alpha: int


def greedy_independent_set(g: Graph) -> list[int]:
    """Repeatedly take a minimum-degree vertex of what remains (lowest index on ties)."""
    alive = g.vertex_mask
    chosen = []
    while alive:
        v = min(iter_bits(alive), key=lambda u: ((g.rows[u] & alive).bit_count(), u))
        chosen.append(v)
        alive &= ~g.rows[v] & ~(1 << v)
    return chosen


def audit_upper(c: ColoredGraph, inst: RamseyInstance) -> UpperAudit:
    """Max degree and max neighbourhood edge count of T, plus a greedy independent set size."""
    if c.n != inst.N or c.k != inst.k:
        raise MalformedColoringError("coloring does not match the instance")
    T = c.union_graph()
    D = max(T.degrees(), default=0)
    D_prime = 0
    for v in range(T.n):
        nb = T.rows[v]
        inside = sum((T.rows[u] & nb).bit_count() for u in iter_bits(nb)) // 2
        D_prime = max(D_prime, inside)
    return UpperAudit(D, D_prime, len(greedy_independent_set(T)))


class ParameterSuggestion(NamedTuple):
    source_sizes: tuple[float, ...]
    N: float


def suggest_parameters(s: Sequence[int], alphas: Sequence[float], t: int) -> ParameterSuggestion:
    """Heuristic sizes ``n_i = (t / ln^2 t)^(1/alpha_i)`` and ``N = t^(S+1) / ln^(2S) t``.

    All hidden constants are set to 1; the asymptotic argument gives no
    finite-scale guarantee for these values.
    """
    if t < 3:
        raise ValueError("t must be at least 3 so that ln t > 1")
    base = t / math.log(t) ** 2
    S = sum(x - 2 for x in s)
    sizes = tuple(base ** (1.0 / a) for a in alphas)
    return ParameterSuggestion(sizes, t ** (S + 1) / math.log(t) ** (2 * S))


# ---------------------------------------------------------------------------
# Seed search driver


@dataclass(frozen=True)
class TrialStats:
    trial: int
    violated_colors: tuple[int, ...]
    largest_last_clique: int | None
    blowup_seeds: tuple[int, ...] | None
    perm_seeds: tuple[int, ...] | None


@dataclass(frozen=True)
class FailureReport:
    instance: RamseyInstance
    mode: str
    master_seed: int | None
    trial_budget: int
    trials: tuple[TrialStats, ...]

    valid = False

    @property
    def best_last_clique(self) -> int | None:
        sizes = [t.largest_last_clique for t in self.trials if t.largest_last_clique is not None]
        return min(sizes) if sizes else None


def _expand_sources(sources: Sequence[Graph], k: int) -> list[Graph]:
    if len(sources) == 1 and k > 1:
        return list(sources) * k
    if len(sources) != k:
        raise SizeMismatchError(f"need 1 or {k} source graphs, got {len(sources)}")
    return list(sources)


def build_trial(sources: Sequence[Graph], recipe: TrialRecipe, k: int | None = None
                ) -> tuple[ColoredGraph, list[BlowupMap]]:
    """Regenerate the coloring of one trial from its recipe (``k`` defaults to ``len(sources)``)."""
    srcs = _expand_sources(sources, len(sources) if k is None else k)
    N = recipe.N
    if recipe.mode == "identity":
        pairs = [even_blowup(g, N) for g in srcs]
        perms = None
    elif recipe.mode == "random":
        if recipe.blowup_seeds is None or recipe.perm_seeds is None:
            raise ValueError("random mode needs blowup and permutation seeds")
        if len(recipe.blowup_seeds) != len(srcs) or len(recipe.perm_seeds) != len(srcs):
            raise SizeMismatchError("recipe needs one blowup and one permutation seed per color")
        pairs = [random_blowup(g, N, sd) for g, sd in zip(srcs, recipe.blowup_seeds)]
        perms = [permutation_from_seed(N, sd) for sd in recipe.perm_seeds]
    else:
        raise ValueError(f"unknown mode {recipe.mode!r}")
    blown = [p[0] for p in pairs]
    return overlay_coloring(blown, perms, recipe.tie_rule), [p[1] for p in pairs]


def trial_recipe(k: int, N: int, mode: str, master_seed: int | None, trial: int,
                 tie_rule: str = "lowest") -> TrialRecipe:
    """Seeds for trial ``trial``: blowup of color i uses key ``(trial, i, 0)``, its permutation ``(trial, i, 1)``."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "identity":
        return TrialRecipe(mode, N, tie_rule, trial, master_seed, None, None)
    if master_seed is None:
        raise ValueError("random mode requires a master seed")
    return TrialRecipe(
        mode,
        N,
        tie_rule,
        trial,
        master_seed,
        tuple(derive_seed(master_seed, trial, i, 0) for i in range(k)),
        tuple(derive_seed(master_seed, trial, i, 1) for i in range(k)),
    )


def witness_from_recipe(
    sources: Sequence[Graph], inst: RamseyInstance, recipe: TrialRecipe
) -> RamseyWitness:
    if recipe.N != inst.N:
        raise SizeMismatchError("recipe and instance disagree on N")
    coloring, _ = build_trial(sources, recipe, inst.k)
    w = verify_witness(coloring, inst)
    return RamseyWitness(w.instance, w.coloring, w.verdicts, recipe)


def certify(
    inst: RamseyInstance,
    sources: Sequence[Graph],
    master_seed: int | None,
    trial_budget: int,
    mode: str = "random",
    tie_rule: str = "lowest",
    measure_failures: bool = True,
) -> RamseyWitness | FailureReport:
    """Search trials in index order and return the first valid witness.

    Sources that are K_{s_i}-free must yield K_{s_i}-free color classes on
    every trial; a breach raises AssertionError.
    """
    if trial_budget < 1:
        raise ValueError("trial budget must be at least 1")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if master_seed is not None:
        check_seed(master_seed)
    srcs = _expand_sources(sources, inst.k)
    source_free = [find_clique(g, s) is None for g, s in zip(srcs, inst.s)]
    # identity mode is deterministic, so one trial settles it
    trials = 1 if mode == "identity" else trial_budget
    stats = []
    for trial in range(trials):
        recipe = trial_recipe(inst.k, inst.N, mode, master_seed, trial, tie_rule)
        w = witness_from_recipe(srcs, inst, recipe)
        for verdict, free in zip(w.verdicts, source_free):
            assert verdict.free or not free, f"color {verdict.color} lost K_s-freeness"
        if w.valid:
            return w
        largest = None
        if measure_failures:
            largest = clique_number(complement(w.coloring.union_graph()))
        stats.append(
            TrialStats(
                trial,
                tuple(v.color for v in w.verdicts if not v.free),
                largest,
                recipe.blowup_seeds,
                recipe.perm_seeds,
            )
        )
    return FailureReport(inst, mode, master_seed, trial_budget, tuple(stats))



@dataclass(frozen=True)
class MonteCarloResult:
    trials: int
    mean: float
    stderr: float
    all_clique_free: bool

    def z_score(self, expected: float) -> float:
        if self.stderr == 0:
            return 0.0 if self.mean == expected else math.inf
        return (self.mean - expected) / self.stderr


def monte_carlo_it(
    g: Graph, N: int, t: int, master_seed: int, trials: int, s: int | None = None
) -> MonteCarloResult:
    """Sample ``i_t`` of random blowups; trial ``j`` uses seed ``derive_seed(master, j)``.

    If ``s`` is given, also checks every sampled blowup is K_s-free.
    """
    if trials < 2:
        raise ValueError("need at least two trials for a standard error")
    total = 0
    total_sq = 0
    all_free = True
    for j in range(trials):
        blown, _ = random_blowup(g, N, derive_seed(master_seed, j))
        if t == 2:
            value = math.comb(N, 2) - blown.num_edges
        else:
            profile = independence_polynomial(blown, t)
            value = profile[t] if t < len(profile) else 0
        total += value
        total_sq += value * value
        if s is not None and all_free and find_clique(blown, s) is not None:
            all_free = False
    mean = total / trials
    var = (total_sq - trials * mean * mean) / (trials - 1)
    return MonteCarloResult(trials, mean, math.sqrt(max(var, 0.0) / trials), all_free)

"""Graph files, certificate documents and replay.

Graph edge-list format::

    # optional comment lines
    n m
    u v        (m lines, u < v, ascending)

Certificate documents are JSON objects with keys ``format_version``, ``kind``,
``payload`` and ``provenance``. ``provenance.recipe`` names an operation and
its arguments (input graphs embedded), so the payload can be re-derived with
no other files. Payload comparison is on canonical JSON bytes.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

import networkx as nx

from . import __version__
from .constructions import family_spec
from .errors import GraphParseError
from .graph_core import Graph, count_independent_tuples, degree_profile
from .ramsey import (
    ColoredGraph,
    FailureReport,
    RamseyInstance,
    RamseyWitness,
    TrialRecipe,
    audit_upper,
    build_trial,
    certify,
    expected_it_blowup,
    lemma5_bound,
    monte_carlo_it,
    verify_witness,
    witness_from_recipe,
)
from .spectral import (
    DEFAULT_TOLERANCE,
    adjacency_spectrum,
    ar_bound,
    ar_trace,
    ndl_certify,
)

FORMAT_VERSION = "1"
SPECTRAL_DIGITS = 12
KINDS = ("spectral", "witness", "failure", "tuple_count", "audit", "bound", "trace", "expectation", "coloring")


# ---------------------------------------------------------------------------
# graph files


def format_graph(g: Graph, comments: bool = True) -> str:
    lines = []
    if comments and g.label:
        lines.append(f"# {g.label}")
    edges = g.edges()
    lines.append(f"{g.n} {len(edges)}")
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def parse_graph(text: str, label: str = "") -> Graph:
    header = None
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise GraphParseError(f"expected integers, got {line!r}", lineno) from None
        if len(nums) != 2:
            raise GraphParseError(f"expected two integers, got {len(nums)}", lineno)
        if header is None:
            if nums[0] < 0 or nums[1] < 0:
                raise GraphParseError("negative header value", lineno)
            header = (nums[0], nums[1])
            continue
        n = header[0]
        u, v = min(nums), max(nums)
        if u < 0 or v >= n:
            raise GraphParseError(f"vertex out of range [0, {n}) in edge {line!r}", lineno)
        if u == v:
            raise GraphParseError(f"self-loop at vertex {u}", lineno)
        if (u, v) in seen:
            raise GraphParseError(f"duplicate edge ({u}, {v})", lineno)
        seen.add((u, v))
    if header is None:
        raise GraphParseError("missing 'n m' header line")
    if len(seen) != header[1]:
        raise GraphParseError(f"header declares {header[1]} edges, found {len(seen)}")
    return Graph.from_edges(header[0], sorted(seen), label)


def to_graph6(g: Graph) -> str:
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from(g.edges())
    return nx.to_graph6_bytes(nxg, header=False).decode("ascii").strip()


def from_graph6(text: str, label: str = "") -> Graph:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    try:
        nxg = nx.from_graph6_bytes(s.encode("ascii"))
    except (nx.NetworkXError, ValueError) as exc:
        raise GraphParseError(f"invalid graph6 string: {exc}") from None
    return Graph.from_edges(nxg.number_of_nodes(), nxg.edges(), label)


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_graph(path: str | os.PathLike, fmt: str | None = None) -> Graph:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if fmt == "graph6" or (fmt is None and path.suffix in (".g6", ".graph6")):
        return from_graph6(text, path.stem)
    return parse_graph(text, path.stem)


def write_graph(g: Graph, path: str | os.PathLike, fmt: str = "edgelist") -> None:
    text = to_graph6(g) + "\n" if fmt == "graph6" else format_graph(g)
    atomic_write_text(path, text)


# ---------------------------------------------------------------------------
# JSON encoding helpers


def encode_float(x: float) -> float | str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def quantize(x: float, scale: float, digits: int = SPECTRAL_DIGITS) -> float:
    """Round to ``digits`` significant digits relative to ``scale``.

    Relative to the spectral radius rather than to each value, so round-off
    noise around zero eigenvalues rounds to exactly 0.
    """
    scale = max(abs(scale), 1.0)
    decimals = digits - (math.floor(math.log10(scale)) + 1)
    return round(x, decimals) + 0.0


def graph_record(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.edges()], "label": g.label}


def graph_from_record(rec: dict) -> Graph:
    return Graph.from_edges(rec["n"], [tuple(e) for e in rec["edges"]], rec.get("label", ""))


def instance_record(inst: RamseyInstance) -> dict:
    return {"s": list(inst.s), "t": inst.t, "N": inst.N, "k": inst.k, "S": inst.S_sum}


def instance_from_record(rec: dict) -> RamseyInstance:
    return RamseyInstance(tuple(rec["s"]), rec["t"], rec["N"])


def coloring_record(c: ColoredGraph) -> dict:
    return {"n": c.n, "k": c.k, "rows": c.upper_rows()}


def coloring_from_record(rec: dict) -> ColoredGraph:
    return ColoredGraph.from_upper_rows(rec["n"], rec["k"], rec["rows"])


def canonical_bytes(obj: Any) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True, allow_nan=False).encode()


# ---------------------------------------------------------------------------
# payload builders (one per recipe op)


def spectral_payload(g: Graph, tolerance: float = DEFAULT_TOLERANCE) -> dict:
    regular, d = degree_profile(g)
    if regular:
        cert = ndl_certify(g, tolerance)
        eig, lam = cert.eigenvalues, cert.lam
    else:
        eig, lam = tuple(adjacency_spectrum(g)), None
    scale = abs(eig[0]) if eig else 1.0
    fam = family_spec(g) if regular else None
    return {
        "n": g.n,
        "regular": regular,
        "d": d,
        "lambda": None if lam is None else quantize(lam, scale),
        "eigenvalues": [quantize(x, scale) for x in eig],
        "tolerance": tolerance,
        "num_edges": g.num_edges,
        "family": None if fam is None else {
            "s": fam.s,
            "alpha": quantize(fam.alpha, 1.0),
            "name": fam.family_name,
            "exponent_conflict": fam.exponent_conflict,
        },
    }


def tuple_count_payload(g: Graph, t: int) -> dict:
    rep = count_independent_tuples(g, t)
    out: dict[str, Any] = {
        "n": g.n,
        "t": t,
        "exact_count": str(rep.exact_count),
        "independence_profile": [str(x) for x in rep.independence_profile],
        "alpha": rep.alpha,
        "ar_bound": None,
    }
    regular, _ = degree_profile(g)
    if regular and g.n > 1 and g.num_edges:
        b = ar_bound(ndl_certify(g), t)
        log_count = math.log(rep.exact_count)
        out["ar_bound"] = {
            "log_bound": encode_float(b.log_bound),
            "log_count": log_count,
            "precondition_met": b.precondition_met,
            "threshold": encode_float(b.threshold),
            "holds": log_count <= b.log_bound,
        }
    return out


def bound_payload(g: Graph, t: int, N: int | None = None) -> dict:
    cert = ndl_certify(g)
    b = ar_bound(cert, t)
    out: dict[str, Any] = {
        "n": cert.n,
        "d": cert.d,
        "lambda": quantize(cert.lam, cert.d),
        "t": t,
        "ar_bound": {
            "log_bound": encode_float(b.log_bound),
            "precondition_met": b.precondition_met,
            "threshold": encode_float(b.threshold),
        },
        "blowup_bound": None,
    }
    if N is not None:
        l5 = lemma5_bound(cert, N, t)
        out["N"] = N
        out["blowup_bound"] = {
            "log_bound": encode_float(l5.log_bound),
            "precondition_met": l5.precondition_met,
            "degenerate": l5.degenerate,
        }
    return out


def trace_payload(g: Graph, sequence: list[int]) -> dict:
    rep = ar_trace(g, ndl_certify(g), sequence)
    return {
        "sequence": list(rep.sequence),
        "sk_sizes": list(rep.sk_sizes),
        "tk_sizes": list(rep.tk_sizes),
        "shrink_steps": rep.shrink_steps,
        "tprime_bound": encode_float(rep.tprime_bound),
        "tk_limit": encode_float(rep.tk_limit),
        "violations": list(rep.violations),
        "ok": rep.ok,
    }


def audit_payload(c: ColoredGraph, inst: RamseyInstance) -> dict:
    a = audit_upper(c, inst)
    return {
        "instance": instance_record(inst),
        "D": a.D,
        "D_prime": a.D_prime,
        "greedy_alpha": a.greedy_alpha,
        "greedy_guarantee": math.ceil(inst.N / (a.D + 1)),
    }


def witness_payload(w: RamseyWitness) -> dict:
    return {
        "instance": instance_record(w.instance),
        "valid": w.valid,
        "verdicts": [
            {"color": v.color, "forbidden": v.forbidden, "free": v.free,
             "clique": None if v.clique is None else list(v.clique)}
            for v in w.verdicts
        ],
        "coloring": coloring_record(w.coloring),
        "trial": None if w.recipe is None else w.recipe.trial,
    }


def failure_payload(f: FailureReport) -> dict:
    return {
        "instance": instance_record(f.instance),
        "valid": False,
        "mode": f.mode,
        "trial_budget": f.trial_budget,
        "trials": [
            {"trial": s.trial, "violated_colors": list(s.violated_colors),
             "largest_last_clique": s.largest_last_clique}
            for s in f.trials
        ],
        "best_last_clique": f.best_last_clique,
    }


def expectation_payload(g: Graph, N: int, t: int, mc_seed: int | None = None,
                        mc_trials: int = 0, s: int | None = None) -> dict:
    exact = expected_it_blowup(g, N, t)
    out: dict[str, Any] = {
        "N": N,
        "t": t,
        "expected_it": f"{exact.numerator}/{exact.denominator}",
        "expected_it_float": float(exact),
        "monte_carlo": None,
    }
    if mc_seed is not None and mc_trials:
        mc = monte_carlo_it(g, N, t, mc_seed, mc_trials, s)
        out["monte_carlo"] = {
            "trials": mc.trials,
            "mean": mc.mean,
            "stderr": mc.stderr,
            "z": encode_float(mc.z_score(float(exact))),
            "clique_size_checked": s,
            "all_clique_free": mc.all_clique_free,
        }
    return out


# ---------------------------------------------------------------------------
# recipes


def _recipe_spectrum(a: dict) -> dict:
    return spectral_payload(graph_from_record(a["graph"]), a.get("tolerance", DEFAULT_TOLERANCE))


def _recipe_count_tuples(a: dict) -> dict:
    return tuple_count_payload(graph_from_record(a["graph"]), a["t"])


def _recipe_bound(a: dict) -> dict:
    return bound_payload(graph_from_record(a["graph"]), a["t"], a.get("N"))


def _recipe_trace(a: dict) -> dict:
    return trace_payload(graph_from_record(a["graph"]), a["sequence"])


def _recipe_audit(a: dict) -> dict:
    return audit_payload(coloring_from_record(a["coloring"]), instance_from_record(a["instance"]))


def _recipe_verify(a: dict) -> dict:
    w = verify_witness(coloring_from_record(a["coloring"]), instance_from_record(a["instance"]))
    return witness_payload(w)


def recipe_record(r: TrialRecipe) -> dict:
    return {
        "mode": r.mode, "N": r.N, "tie_rule": r.tie_rule, "trial": r.trial,
        "master_seed": r.master_seed,
        "blowup_seeds": None if r.blowup_seeds is None else list(r.blowup_seeds),
        "perm_seeds": None if r.perm_seeds is None else list(r.perm_seeds),
    }


def recipe_from_record(rec: dict) -> TrialRecipe:
    def tup(x):
        return None if x is None else tuple(x)

    return TrialRecipe(rec["mode"], rec["N"], rec["tie_rule"], rec["trial"], rec["master_seed"],
                       tup(rec["blowup_seeds"]), tup(rec["perm_seeds"]))


def _recipe_witness(a: dict) -> dict:
    sources = [graph_from_record(g) for g in a["sources"]]
    w = witness_from_recipe(sources, instance_from_record(a["instance"]), recipe_from_record(a["trial"]))
    return witness_payload(w)


def _recipe_certify(a: dict) -> dict:
    sources = [graph_from_record(g) for g in a["sources"]]
    res = certify(instance_from_record(a["instance"]), sources, a["master_seed"], a["trial_budget"],
                  a["mode"], a["tie_rule"])
    return witness_payload(res) if isinstance(res, RamseyWitness) else failure_payload(res)


def _recipe_expectation(a: dict) -> dict:
    return expectation_payload(graph_from_record(a["graph"]), a["N"], a["t"], a.get("mc_seed"),
                               a.get("mc_trials", 0), a.get("s"))


def _recipe_coloring(a: dict) -> dict:
    sources = [graph_from_record(g) for g in a["sources"]]
    c, _ = build_trial(sources, recipe_from_record(a["trial"]), a.get("k"))
    return coloring_record(c)


RECIPES: dict[str, Callable[[dict], dict]] = {
    "spectrum": _recipe_spectrum,
    "count_tuples": _recipe_count_tuples,
    "bound": _recipe_bound,
    "trace": _recipe_trace,
    "audit": _recipe_audit,
    "verify": _recipe_verify,
    "witness": _recipe_witness,
    "certify": _recipe_certify,
    "expectation": _recipe_expectation,
    "coloring": _recipe_coloring,
}


def make_document(kind: str, op: str, args: dict, *, master_seed: int | None = None,
                  derived_seeds: list[int] | None = None, family_specs: list | None = None,
                  payload: dict | None = None) -> dict:
    """Build a document by running recipe ``op`` on ``args`` (or using ``payload`` if given)."""
    if kind not in KINDS:
        raise ValueError(f"unknown document kind {kind!r}")
    if payload is None:
        payload = RECIPES[op](args)
    return {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "payload": payload,
        "provenance": {
            "tool_version": __version__,
            "master_seed": master_seed,
            "derived_seeds": derived_seeds or [],
            "source_family_specs": family_specs or [],
            "timestamps": {"created": datetime.now(timezone.utc).isoformat(timespec="seconds")},
            "recipe": {"op": op, "args": args},
        },
    }


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True, allow_nan=False) + "\n"


def write_document(doc: dict, path: str | os.PathLike) -> None:
    atomic_write_text(path, dumps_document(doc))


def load_document(path: str | os.PathLike) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    for key in ("format_version", "kind", "payload", "provenance"):
        if key not in doc:
            raise ValueError(f"certificate document missing {key!r}")
    return doc


def replay(doc: dict) -> tuple[bool, bytes, bytes]:
    """Re-derive a document's payload from its recipe; returns (match, stored, fresh) canonical bytes."""
    recipe = doc["provenance"]["recipe"]
    fresh = RECIPES[recipe["op"]](recipe["args"])
    stored_b = canonical_bytes(doc["payload"])
    fresh_b = canonical_bytes(json.loads(json.dumps(fresh)))
    return stored_b == fresh_b, stored_b, fresh_b

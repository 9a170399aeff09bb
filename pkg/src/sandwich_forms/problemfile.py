"""Problem files for the command line.

A problem file is TOML with the tables ``[space]``, ``[form]``, an optional
``[form2]``, ``[pair]`` and ``[run]``::

    [space]
    nodes = ["1", "2", "3"]
    masses = [1, 1, 1]
    boundary = []

    [form]
    type = "graph"
    edges = [["1", "2", 1.0], ["2", "3", 1.0]]
    killing = { "2" = 5.0 }

    [run]
    times = [0.05, 0.5, 2.0]

Form types: ``graph`` (edges, killing, support), ``explicit`` (coeff,
support, optional edges), ``interval`` (n, kind, V, boundary_mass, beta,
robin_scale), ``grid2d`` (nx, ny, kind, beta, clamped, V, boundary_mass,
robin_scale) and ``fractional`` (n, s, kind).  The model types build their
own space, so ``[space]`` is only read by ``graph`` and ``explicit``.
``[form2]`` may also be ``restricted``: the main part of ``[form]``
restricted by ``[pair]``, or ``main_part``.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .core import GraphForm, MeasureSpace, QuadForm, form_from_graph
from .decomposition import active_main_part
from .errors import SandwichFormsError
from .models import fractional_form, grid2d_laplacian, interval_laplacian
from .sandwich import AdmissiblePair, restricted_form


class ParseError(Exception):
    """Malformed problem file; ``line`` is set when the parser knows it."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass
class Problem:
    form: QuadForm
    form2: QuadForm | None
    pair: AdmissiblePair | None
    run: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)
    digest: str = ""


def _require(table, key, where):
    if key not in table:
        raise ParseError(f"[{where}] is missing '{key}'")
    return table[key]


def _space(raw):
    t = raw.get("space")
    if t is None:
        raise ParseError("this form type needs a [space] table")
    nodes = [str(x) for x in _require(t, "nodes", "space")]
    masses = t.get("masses", [1.0] * len(nodes))
    if len(masses) != len(nodes):
        raise ParseError("[space] masses and nodes differ in length")
    boundary = [str(x) for x in t.get("boundary", [])]
    unknown = set(boundary) - set(nodes)
    if unknown:
        raise ParseError(f"[space] boundary names unknown nodes {sorted(unknown)}")
    try:
        return MeasureSpace(np.array(masses, dtype=float), tuple(nodes),
                            frozenset(nodes.index(x) for x in boundary))
    except (ValueError, TypeError) as exc:
        raise ParseError(f"[space] {exc}") from None


def _node(space, name, where):
    try:
        return space.index(str(name))
    except ValueError:
        raise ParseError(f"[{where}] refers to unknown node {name!r}") from None


def _nodes(space, names, where):
    if names == "all":
        return space.nodes
    return tuple(_node(space, x, where) for x in names)


def _node_table(space, table, where):
    out = np.zeros(space.n)
    for name, value in table.items():
        out[_node(space, name, where)] = float(value)
    return out


def _beta(value):
    if isinstance(value, dict):
        return {str(k): float(v) for k, v in value.items()}
    if isinstance(value, list):
        return tuple(float(v) for v in value)
    return float(value)


def build_form(t, raw, where, base=None, pair=None):
    kind = _require(t, "type", where)
    try:
        if kind == "graph":
            space = _space(raw)
            b = np.zeros((space.n, space.n))
            for entry in t.get("edges", []):
                if len(entry) != 3:
                    raise ParseError(f"[{where}] edges entries are [node, node, weight]")
                x, y = _node(space, entry[0], where), _node(space, entry[1], where)
                b[x, y] = b[y, x] = float(entry[2])
            c = _node_table(space, t.get("killing", {}), where)
            support = _nodes(space, t.get("support", "all"), where)
            return form_from_graph(GraphForm(space, b, c, support))
        if kind == "explicit":
            space = _space(raw)
            support = _nodes(space, t.get("support", "all"), where)
            edges = t.get("edges")
            if edges is not None:
                b = np.zeros((space.n, space.n))
                for x, y, w in edges:
                    x, y = _node(space, x, where), _node(space, y, where)
                    b[x, y] = b[y, x] = float(w)
                edges = b
            return QuadForm(space, support, np.array(_require(t, "coeff", where), dtype=float), edges)
        if kind == "interval":
            beta = _beta(t.get("beta", 0.0))
            return interval_laplacian(int(_require(t, "n", where)), t.get("kind", "dirichlet"),
                                      t.get("V"), t.get("boundary_mass"), beta,
                                      t.get("robin_scale", "absolute"))
        if kind == "grid2d":
            return grid2d_laplacian(int(_require(t, "nx", where)), int(_require(t, "ny", where)),
                                    t.get("kind", "dirichlet"), _beta(t.get("beta", 0.0)),
                                    tuple(str(x) for x in t.get("clamped", [])), t.get("V"),
                                    t.get("boundary_mass"), t.get("robin_scale", "absolute"))
        if kind == "fractional":
            return fractional_form(int(_require(t, "n", where)), float(_require(t, "s", where)),
                                   t.get("kind", "dirichlet"), t.get("boundary_mass"))
        if kind in ("restricted", "main_part"):
            if base is None:
                raise ParseError(f"[{where}] type {kind!r} needs a [form] to start from")
            qm = active_main_part(base)
            if kind == "main_part":
                return qm
            if pair is None:
                raise ParseError(f"[{where}] type 'restricted' needs a [pair] table")
            return restricted_form(qm, pair)
    except (ParseError, SandwichFormsError):
        raise
    except (TypeError, KeyError, ValueError) as exc:
        raise ParseError(f"[{where}] {exc}") from None
    raise ParseError(f"[{where}] unknown form type {kind!r}")


def _pair(t, space):
    O = _nodes(space, t.get("O", "all"), "pair")
    try:
        mu = _node_table(space, t.get("mu", {}), "pair")
    except (TypeError, ValueError) as exc:
        raise ParseError(f"[pair] {exc}") from None
    return AdmissiblePair(frozenset(O), mu)


def parse_text(text: str) -> Problem:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        if line is None:
            m = re.search(r"line (\d+)", str(exc))
            line = int(m.group(1)) if m else None
        raise ParseError(str(exc).split(" (at line")[0], line) from None
    if "form" not in raw:
        raise ParseError("missing [form] table")
    form = build_form(raw["form"], raw, "form")
    pair = _pair(raw["pair"], form.space) if "pair" in raw else None
    form2 = build_form(raw["form2"], raw, "form2", base=form, pair=pair) if "form2" in raw else None
    run = dict(raw.get("run", {}))
    return Problem(form, form2, pair, run, raw, hashlib.sha256(text.encode()).hexdigest())


def load(path) -> Problem:
    with open(path, encoding="utf-8") as fh:
        return parse_text(fh.read())

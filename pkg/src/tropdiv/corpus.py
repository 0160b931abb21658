"""Named example graphs and divisors.

The builders here are the source of truth; the JSON files shipped in
``tropdiv/corpus/`` are generated from them by ``scripts/make_corpus.py`` and
carry their genus under ``"meta"``.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .divisor import Divisor
from .errors import ValidationError
from .graph import MetricGraph, genus


def banana(g: int) -> MetricGraph:
    """Two vertices ``v1``, ``v2`` joined by ``g + 1`` unit edges (genus ``g``)."""
    return MetricGraph.build(["v1", "v2"], [(f"e{i}", "v1", "v2") for i in range(1, g + 2)])


def theta() -> MetricGraph:
    return MetricGraph.build(["u", "v"], [(f"e{i}", "u", "v") for i in (1, 2, 3)])


def three_petal(center_weight: int = 0) -> MetricGraph:
    """Centre ``v0`` with three bridges ``e1..e3`` to petals of two parallel unit edges."""
    verts = [("v0", center_weight)] + [f"a{i}" for i in (1, 2, 3)] + [f"b{i}" for i in (1, 2, 3)]
    edges = [(f"e{i}", "v0", f"a{i}") for i in (1, 2, 3)]
    edges += [(f"p{i}{s}", f"a{i}", f"b{i}") for i in (1, 2, 3) for s in "xy"]
    return MetricGraph.build(verts, edges)


def ladder4() -> MetricGraph:
    """Genus-4 ladder: three vertical paths capped by two arcs, symmetric about the middle row.

    Top row ``w1 - v1 - w3``, bottom row ``v2 - b2 - b3``, middle row
    ``m0, m1, w2, m3, m4`` (the fixed points of the reflection).
    """
    verts = ["w1", "v1", "w3", "v2", "b2", "b3", "m0", "m1", "w2", "m3", "m4"]
    edges = [
        ("t1", "w1", "v1"),
        ("t2", "v1", "w3"),
        ("d1", "v2", "b2"),
        ("d2", "b2", "b3"),
        ("x1", "v2", "m1"),
        ("x2", "m1", "w1"),
        ("y1", "b2", "w2"),
        ("y2", "w2", "v1"),
        ("z1", "b3", "m3"),
        ("z2", "m3", "w3"),
        ("l1", "m0", "w1"),
        ("l2", "m0", "v2"),
        ("r1", "m4", "w3"),
        ("r2", "m4", "b3"),
    ]
    return MetricGraph.build(verts, edges)


def complete4() -> MetricGraph:
    ids = ["a", "b", "c", "d"]
    return MetricGraph.build(ids, [(f"{x}{y}", x, y) for i, x in enumerate(ids) for y in ids[i + 1 :]])


def path(n: int) -> MetricGraph:
    return MetricGraph.build([f"p{i}" for i in range(n + 1)], [(f"s{i}", f"p{i}", f"p{i + 1}") for i in range(n)])


def star(k: int) -> MetricGraph:
    return MetricGraph.build(["c"] + [f"l{i}" for i in range(k)], [(f"s{i}", "c", f"l{i}") for i in range(k)])


def cycle(n: int) -> MetricGraph:
    if n == 1:
        return MetricGraph.build(["c0"], [("s0", "c0", "c0")])
    return MetricGraph.build([f"c{i}" for i in range(n)], [(f"s{i}", f"c{i}", f"c{(i + 1) % n}") for i in range(n)])


def weighted_point(w: int) -> MetricGraph:
    return MetricGraph.build([("v", w)], [])


def builders() -> dict[str, MetricGraph]:
    out = {
        "theta": theta(),
        "three-petal": three_petal(),
        "three-petal-weighted": three_petal(1),
        "ladder4": ladder4(),
        "K4": complete4(),
        "tree-path3": path(3),
        "tree-star3": star(3),
        "cycle1": cycle(1),
        "cycle3": cycle(3),
    }
    for g in (2, 3, 4, 5):
        out[f"banana{g}"] = banana(g)
    for w in (1, 2, 3):
        out[f"weighted{w}"] = weighted_point(w)
    return out


def divisor_fixtures() -> dict[str, tuple[str, dict]]:
    """``name -> (graph name, {point: coeff})``."""
    return {
        "ladder4-D": ("ladder4", {"v1": 3, "v2": 1}),
        "three-petal-D": ("three-petal", {"v0": 2}),
        "banana3-D": ("banana3", {"v1": 1, "v2": 1}),
        "tree-path3-negative": ("tree-path3", {"p0": -1}),
    }


def graph_document(name: str, g: MetricGraph) -> dict:
    doc = g.to_json()
    gen = genus(g)
    doc["meta"] = {"name": name, "genus": {"weighted": gen.weighted, "unweighted": gen.unweighted}}
    return doc


# -- loading ------------------------------------------------------------------------


def corpus_dir():
    return resources.files("tropdiv") / "corpus"


def resolve(path: str):
    """A file on disk, or failing that a bundled corpus file (``corpus/name.json`` or ``name``)."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.suffix == ".json" else p.name + ".json"
    bundled = corpus_dir() / name
    if bundled.is_file():
        return bundled
    raise ValidationError(f"no such file: {path}")


def read_json(path: str):
    try:
        return json.loads(resolve(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def names() -> list[str]:
    return sorted(p.name[:-5] for p in corpus_dir().iterdir() if p.name.endswith(".json"))


def load_graph(name: str) -> MetricGraph:
    return MetricGraph.from_json(read_json(name))


def load_divisor(graph: MetricGraph, name: str) -> Divisor:
    obj = read_json(name)
    if isinstance(obj, dict) and "divisor" in obj:
        obj = obj["divisor"]
    return Divisor.from_json(graph, obj)

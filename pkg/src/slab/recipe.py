"""Experiment recipes: a generated instance, a pipeline of steps and assertions.

A recipe is JSON::

    {
      "name": "base-r4-lemmas",
      "family": {"family": "base", "r": 4},
      "steps": [{"op": "verify", "lemma": "unique"}, ...],
      "assertions": [{"metric": "generate.num_paths", "op": "==", "value": 256}]
    }

Every step publishes metrics under its ``id`` (default: its ``op``).  An
assertion compares ``metric`` against a literal ``value`` or against
``factor * ref`` where ``ref`` names another metric.  Randomized steps must
carry an explicit ``seed``.
"""
import json
import operator
import os
import time
from dataclasses import dataclass, field
from importlib import resources
from math import ceil, sqrt

import jsonschema
import numpy as np

from . import io
from .construct import build_base, build_gd, critical_walks, path_subsample, sample_source_set
from .errors import InputError
from .graph import ShortcutSet, diameter, distance_histogram
from .potential import STRATEGIES, PotentialConfig, adversary_run, build_augment, potential
from .shortcuts import folklore_shortcut, sourcewise_diameter, sourcewise_shortcut
from .verify import verify_overlap_bound, verify_unique_paths, verify_vertex_disjoint

REPORT_SCHEMA = "slab.run-report/1"

OPS = {"==": operator.eq, "!=": operator.ne, "<=": operator.le, "<": operator.lt,
       ">=": operator.ge, ">": operator.gt}

_seed = {"type": "integer", "minimum": 0, "maximum": 2**64 - 1}
_step_common = {"id": {"type": "string", "pattern": "^[A-Za-z0-9_-]+$"}}


def _step(op, props, required=()):
    return {
        "type": "object",
        "properties": {"op": {"const": op}, **_step_common, **props},
        "required": ["op", *required],
        "additionalProperties": False,
    }


RECIPE_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "family": {
            "type": "object",
            "properties": {
                "family": {"enum": ["base", "gd"]},
                "r": {"type": "integer", "minimum": 1},
                "d": {"type": "integer", "minimum": 1},
                "subsample": {"type": "integer", "minimum": 1},
            },
            "required": ["family", "r"],
            "additionalProperties": False,
        },
        "steps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["op"],
                "properties": {"op": {"enum": ["verify", "sources", "potential", "adversary",
                                               "shortcut", "eval"]}},
                "allOf": [
                    {"if": {"properties": {"op": {"const": "verify"}}},
                     "then": _step("verify", {"lemma": {"enum": ["unique", "disjoint", "overlap"]},
                                              "constant": {"type": "number"}}, ["lemma"])},
                    {"if": {"properties": {"op": {"const": "sources"}}},
                     "then": _step("sources", {"seed": _seed,
                                               "probability": {"type": "number", "minimum": 0}},
                                   ["seed"])},
                    {"if": {"properties": {"op": {"const": "potential"}}},
                     "then": _step("potential", {"c": {"type": "integer", "minimum": 0},
                                                 "half_layer": {"type": "boolean"},
                                                 "shortcuts": {"type": "string"}})},
                    {"if": {"properties": {"op": {"const": "adversary"}}},
                     "then": _step("adversary", {
                         "budget": {"type": "integer", "minimum": 0},
                         "strategy": {"enum": list(STRATEGIES)},
                         "c": {"type": "integer", "minimum": 0},
                         "half_layer": {"type": "boolean"},
                         "seed": _seed}, ["budget", "strategy", "seed"])},
                    {"if": {"properties": {"op": {"const": "shortcut"}}},
                     "then": _step("shortcut", {
                         "algo": {"enum": ["folklore", "sourcewise"]},
                         "seed": _seed,
                         "target_d": {"type": "integer", "minimum": 1},
                         "alpha": {"type": "number", "exclusiveMinimum": 0},
                         "beta": {"type": "number", "exclusiveMinimum": 0},
                         "gamma": {"type": "number", "exclusiveMinimum": 0}},
                         ["algo", "seed"])},
                    {"if": {"properties": {"op": {"const": "eval"}}},
                     "then": _step("eval", {"shortcuts": {"type": "string"},
                                            "sourcewise": {"type": "boolean"}})},
                ],
            },
        },
        "assertions": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "metric": {"type": "string"},
                    "op": {"enum": list(OPS)},
                    "value": {"type": ["number", "boolean"]},
                    "ref": {"type": "string"},
                    "factor": {"type": "number"},
                },
                "required": ["metric", "op"],
                "oneOf": [{"required": ["value"]}, {"required": ["ref"]}],
                "additionalProperties": False,
            },
        },
    },
    "required": ["name"],
    "additionalProperties": False,
}


class RecipeError(InputError):
    """Malformed recipe; the message carries a line/column or a field path."""


def _field_path(parts):
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def parse_recipe(text, source="<recipe>"):
    """Parse and validate recipe JSON; raises :class:`RecipeError` with diagnostics."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecipeError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(RECIPE_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = max(errors, key=lambda e: len(e.absolute_path))
        raise RecipeError(f"{source}: {_field_path(err.absolute_path)}: {err.message}")
    ids = set()
    for i, step in enumerate(data.get("steps", [])):
        sid = step.get("id", step["op"])
        if sid in ids or sid == "generate":
            raise RecipeError(f"{source}: $.steps[{i}].id: duplicate step id {sid!r}; "
                              "give the step an explicit 'id'")
        ids.add(sid)
    if data.get("steps") and "family" not in data:
        raise RecipeError(f"{source}: $.family: required when the pipeline has steps")
    return data


def builtin_recipes():
    return sorted(p.name[:-5] for p in resources.files("slab.recipes").iterdir()
                  if p.name.endswith(".json"))


def load_recipe(source):
    """``source`` is a file path or the name of a bundled recipe."""
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return parse_recipe(fh.read(), source)
    if source in builtin_recipes():
        text = resources.files("slab.recipes").joinpath(source + ".json").read_text("utf-8")
        return parse_recipe(text, source)
    raise RecipeError(f"no recipe file or bundled recipe named {source!r}")


@dataclass
class RunReport:
    recipe: str
    config: dict
    steps: list = field(default_factory=list)
    assertions: list = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def passed(self):
        return all(a["passed"] for a in self.assertions)

    def metric(self, name):
        step, _, key = name.partition(".")
        for s in self.steps:
            if s["id"] == step and key in s["metrics"]:
                return s["metrics"][key]
        raise KeyError(name)

    def to_json(self):
        return {"schema": REPORT_SCHEMA, "recipe": self.recipe, "config": self.config,
                "steps": self.steps, "assertions": self.assertions, "passed": self.passed,
                "wall_clock": self.wall_clock}


class _Context:
    def __init__(self, family):
        self.family = family
        self.graph = self.paths = self.walks = self.sources = None
        self.shortcuts = {}

    def generate(self):
        fam = self.family
        d = fam.get("d", 1)
        if fam["family"] == "base":
            if d != 1:
                raise InputError("family 'base' has d = 1")
            graph, paths = build_base(fam["r"])
        else:
            graph, paths = build_gd(fam["r"], d)
        self.full_graph = graph
        k = fam.get("subsample", 1)
        self.graph = path_subsample(graph, k) if k > 1 else graph
        self.paths = paths
        return {"n": self.graph.n, "m": self.graph.m, "num_paths": len(paths),
                "num_layers": self.graph.num_layers, "r": fam["r"], "d": d}

    def get_walks(self):
        if self.walks is None:
            self.walks = critical_walks(self.graph, self.paths)
        return self.walks

    def get_shortcuts(self, sid):
        if sid is None:
            return None
        if sid not in self.shortcuts:
            raise InputError(f"no shortcut step with id {sid!r} ran before this step")
        return self.shortcuts[sid]


def _run_step(ctx, step):
    op = step["op"]
    if op == "verify":
        fn = {"unique": verify_unique_paths, "disjoint": verify_vertex_disjoint}.get(step["lemma"])
        if fn is not None:
            rep = fn(ctx.graph, ctx.paths, walks=ctx.get_walks())
        else:
            rep = verify_overlap_bound(ctx.graph, ctx.paths, constant=step.get("constant", 8),
                                       walks=ctx.get_walks())
        return {"checked": rep.checked, "violations": len(rep.violations),
                "max_ratio": rep.max_ratio, "passed": rep.passed}
    if op == "sources":
        ctx.sources = sample_source_set(ctx.full_graph, step["seed"], step.get("probability"))
        return {"count": len(ctx.sources)}
    if op == "potential":
        config = PotentialConfig(step.get("c", 0), step.get("half_layer", False))
        aug = build_augment(ctx.graph, config)
        H = ctx.get_shortcuts(step.get("shortcuts"))
        phi = potential(ctx.graph, aug, H, ctx.paths, walks=ctx.get_walks())
        return {"phi": phi, "augment_size": len(aug), "num_paths": len(ctx.paths)}
    if op == "adversary":
        config = PotentialConfig(step.get("c", 0), step.get("half_layer", False))
        rep = adversary_run(ctx.graph, ctx.paths, step["budget"], step["strategy"], step["seed"],
                            config=config)
        out = rep.to_json()
        return {"initial": rep.initial, "final": rep.final, "budget_used": rep.budget_used,
                "max_pair_distance": rep.max_pair_distance, "num_paths": rep.num_paths,
                "max_drop": max(rep.drops, default=0), "total_drop": sum(rep.drops),
                "drop_histogram": out["drop_histogram"]}
    if op == "shortcut":
        if step["algo"] == "folklore":
            D = step.get("target_d") or ceil(sqrt(ctx.graph.n))
            H = folklore_shortcut(ctx.graph, D, step["seed"], alpha=step.get("alpha", 3.0))
        else:
            if ctx.sources is None:
                raise InputError("sourcewise shortcut needs a preceding 'sources' step")
            H = sourcewise_shortcut(ctx.graph, ctx.sources, step["seed"],
                                    beta=step.get("beta", 1.0), gamma=step.get("gamma", 1.0))
        ctx.shortcuts[step.get("id", "shortcut")] = H
        metrics = {"size": len(H)}
        metrics.update({k: v for k, v in H.meta.items() if isinstance(v, (int, float))})
        return metrics
    if op == "eval":
        H = ctx.get_shortcuts(step.get("shortcuts"))
        if step.get("sourcewise"):
            if ctx.sources is None:
                raise InputError("sourcewise eval needs a preceding 'sources' step")
            hist = distance_histogram(ctx.graph, H, ctx.sources.vertices)
            return {"diameter": sourcewise_diameter(ctx.graph, H, ctx.sources),
                    "pairs": sum(hist.values())}
        hist = distance_histogram(ctx.graph, H)
        return {"diameter": diameter(ctx.graph, H), "pairs": sum(hist.values())}
    raise InputError(f"unknown op {op!r}")


def _check(report, assertion):
    entry = dict(assertion)
    try:
        actual = report.metric(assertion["metric"])
        if "ref" in assertion:
            expected = assertion.get("factor", 1) * report.metric(assertion["ref"])
        else:
            expected = assertion["value"]
    except KeyError as exc:
        entry.update(actual=None, expected=None, passed=False,
                     error=f"unknown metric {exc.args[0]!r}")
        return entry
    entry.update(actual=actual, expected=expected,
                 passed=bool(OPS[assertion["op"]](actual, expected)))
    return entry


def run_recipe(recipe, out_dir=None):
    """Execute ``recipe`` (parsed dict); optionally write artifacts into ``out_dir``."""
    t0 = time.perf_counter()
    report = RunReport(recipe["name"], recipe)
    steps = recipe.get("steps", [])
    if "family" in recipe:
        ctx = _Context(recipe["family"])
        t = time.perf_counter()
        metrics = ctx.generate()
        report.steps.append({"id": "generate", "op": "generate", "metrics": metrics,
                             "seconds": time.perf_counter() - t})
        for step in steps:
            t = time.perf_counter()
            metrics = _run_step(ctx, step)
            report.steps.append({"id": step.get("id", step["op"]), "op": step["op"],
                                 "metrics": metrics, "seconds": time.perf_counter() - t})
        if out_dir:
            _write_artifacts(ctx, out_dir)
    report.assertions = [_check(report, a) for a in recipe.get("assertions", [])]
    report.wall_clock = time.perf_counter() - t0
    return report


def _write_artifacts(ctx, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    io.write_graph(ctx.graph, os.path.join(out_dir, "graph.slab"))
    io.write_paths(ctx.paths, os.path.join(out_dir, "graph.slab.paths"))
    if ctx.sources is not None:
        io.write_sources(ctx.sources, os.path.join(out_dir, "graph.slab.sources"))
    for sid, H in ctx.shortcuts.items():
        io.write_shortcuts(H, os.path.join(out_dir, f"{sid}.H"))


def to_jsonable(obj):
    """``json.dump`` default hook for numpy scalars."""
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")

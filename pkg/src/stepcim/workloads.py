"""Workload suite loading.

Suite files are JSON with the documented schema::

    {"schema": "stepcim-suite-1",
     "workloads": [{"name": ..., "layers": [
         {"name": ..., "kind": "conv|fc|recurrent-step",
          "macs": int, "weights": int, "sparsity": float (optional)}]}]}

The shipped default covers five inference benchmarks (two CNNs, an
inception-style CNN, and two recurrent cells) with standard public layer
MAC/weight counts; edit or replace the file to model other networks.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .system import Workload, WorkloadLayer

SUITE_SCHEMA = "stepcim-suite-1"


def _parse_suite(doc: dict, source: str) -> list[Workload]:
    if not isinstance(doc, dict) or doc.get("schema") != SUITE_SCHEMA:
        raise ConfigError(f"{source}: expected schema {SUITE_SCHEMA!r}")
    known_layer = {"name", "kind", "macs", "weights", "sparsity"}
    out = []
    for wl in doc.get("workloads", []):
        unknown = set(wl) - {"name", "layers"}
        if unknown:
            raise ConfigError(f"{source}: unknown workload keys {sorted(unknown)}")
        layers = []
        for layer in wl["layers"]:
            bad = set(layer) - known_layer
            if bad:
                raise ConfigError(f"{source}: unknown layer keys {sorted(bad)}")
            layers.append(
                WorkloadLayer(
                    name=layer["name"],
                    kind=layer["kind"],
                    macs=int(layer["macs"]),
                    weights=int(layer["weights"]),
                    sparsity=float(layer.get("sparsity", 0.5)),
                )
            )
        out.append(Workload(name=wl["name"], layers=tuple(layers)))
    if not out:
        raise ConfigError(f"{source}: suite has no workloads")
    return out


def load_suite(path: str | Path | None = None) -> list[Workload]:
    """Load a suite file, or the shipped default when no path is given."""
    if path is None:
        text = resources.files("stepcim.data").joinpath("default_suite.json").read_text()
        source = "default suite"
    else:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read suite file {p}: {exc}") from exc
        source = str(p)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}, col {exc.colno}: {exc.msg}") from exc
    return _parse_suite(doc, source)

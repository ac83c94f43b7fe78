"""Instance generation, the 20-node benchmark fixture, and persistence.

Instance files are single JSON documents; fuzzy triples are serialized as
[lo, mid, hi] and the distance matrix row-major as nested lists.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DomainError, InstanceFormatError
from .fuzzy import TriFuzzy
from .model import Instance

TABLE1_SHA256 = "172a3c7598cd8bb5d8947d4d27b27de7bcfd52b3584cb20bac03207f75c9db6e"


@dataclass(frozen=True)
class GeneratorParams:
    """Ranges for random instance generation.

    Fuzzy rates are drawn as an integer lo plus fixed offsets so the triple
    ordering holds by construction.
    """

    n: int
    m_servers: int
    demand_lo_range: tuple[int, int] = (4, 80)
    demand_offsets: tuple[int, int] = (50, 100)
    service_lo_range: tuple[int, int] = (144, 190)
    service_offsets: tuple[int, int] = (50, 100)
    distance_range: tuple[int, int] = (1, 35)
    idle_min: TriFuzzy = field(default_factory=lambda: TriFuzzy(0.1, 0.15, 0.2))
    mql: float = 25.0
    gamma: float = 0.5
    logit_sensitivity: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("demand_lo_range", "service_lo_range", "distance_range"):
            low, high = getattr(self, name)
            if low > high:
                raise DomainError(f"{name} is empty: [{low}, {high}]")
        for name in ("demand_offsets", "service_offsets"):
            first, second = getattr(self, name)
            if not (0 < first < second):
                raise DomainError(f"{name} must be positive and increasing")
        if self.distance_range[0] < 1:
            raise DomainError("distances must be positive")


def _fuzzy_column(rng: np.random.Generator, n: int, lo_range, offsets) -> np.ndarray:
    lo = rng.integers(lo_range[0], lo_range[1] + 1, size=n).astype(float)
    return np.stack([lo, lo + offsets[0], lo + offsets[1]], axis=1)


def generate_instance(params: GeneratorParams) -> Instance:
    """Draw a random instance; deterministic for a fixed seed."""
    rng = np.random.default_rng(params.seed)
    demand = _fuzzy_column(rng, params.n, params.demand_lo_range, params.demand_offsets)
    service = _fuzzy_column(rng, params.n, params.service_lo_range, params.service_offsets)
    low, high = params.distance_range
    upper = rng.integers(low, high + 1, size=(params.n, params.n)).astype(float)
    distance = np.triu(upper, k=1)
    distance = distance + distance.T
    return Instance(
        n=params.n,
        m_servers=params.m_servers,
        distance=distance,
        demand=demand,
        service=service,
        idle_min=params.idle_min,
        mql=params.mql,
        gamma=params.gamma,
        logit_sensitivity=params.logit_sensitivity,
    )


def instance_to_dict(instance: Instance) -> dict:
    doc = {
        "n": instance.n,
        "m_servers": instance.m_servers,
        "mql": instance.mql,
        "gamma": instance.gamma,
        "logit_sensitivity": instance.logit_sensitivity,
        "idle_min": list(instance.idle_min.as_tuple()),
        "demand": instance.demand.tolist(),
        "service": instance.service.tolist(),
        "distance": instance.distance.tolist(),
    }
    if instance.benefit_weight is not None:
        doc["benefit_weight"] = instance.benefit_weight.tolist()
    return doc


def instance_from_dict(doc: dict) -> Instance:
    required = ("n", "m_servers", "mql", "gamma", "logit_sensitivity",
                "idle_min", "demand", "service", "distance")
    for key in required:
        if key not in doc:
            raise InstanceFormatError(f"missing field {key!r}")
    n = int(doc["n"])
    for key, rows in (("demand", doc["demand"]), ("service", doc["service"])):
        if len(rows) != n:
            raise InstanceFormatError(f"{key} has {len(rows)} rows, expected {n}")
        for i, row in enumerate(rows):
            if len(row) != 3:
                raise InstanceFormatError(f"{key} row {i + 1} is not a fuzzy triple")
    if len(doc["distance"]) != n or any(len(row) != n for row in doc["distance"]):
        bad = next(
            (i + 1 for i, row in enumerate(doc["distance"]) if len(row) != n),
            len(doc["distance"]),
        )
        raise InstanceFormatError(f"distance row {bad} malformed (matrix must be {n}x{n})")
    try:
        return Instance(
            n=n,
            m_servers=int(doc["m_servers"]),
            distance=np.asarray(doc["distance"], dtype=float),
            demand=np.asarray(doc["demand"], dtype=float),
            service=np.asarray(doc["service"], dtype=float),
            idle_min=TriFuzzy.from_seq(doc["idle_min"]),
            mql=float(doc["mql"]),
            gamma=float(doc["gamma"]),
            logit_sensitivity=float(doc["logit_sensitivity"]),
            benefit_weight=(
                np.asarray(doc["benefit_weight"], dtype=float)
                if doc.get("benefit_weight") is not None
                else None
            ),
        )
    except DomainError as exc:
        raise InstanceFormatError(str(exc)) from exc


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), sort_keys=True, indent=1) + "\n")


def load_instance(path) -> Instance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError(f"{path}: top-level JSON must be an object")
    return instance_from_dict(doc)


def table1_bytes() -> bytes:
    return resources.files("fuzzloc.data").joinpath("table1.json").read_bytes()


def load_table1() -> Instance:
    """The transcribed 20-node benchmark instance (M=5, default parameters)."""
    raw = table1_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if digest != TABLE1_SHA256:
        raise InstanceFormatError(
            f"table1 fixture checksum mismatch: {digest} != {TABLE1_SHA256}"
        )
    return instance_from_dict(json.loads(raw))

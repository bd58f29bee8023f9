"""Run configuration: JSON in, validated dataclass out."""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field

DEFAULTS = {
    "rank": 2,
    "modulus": 2,
    "weights": None,
    "radii": {"support": 5, "index": 7, "subgroup": 5, "interior": 2},
    "kernel": {"M": 64, "taper": "sharp"},
    "tolerances": {
        "parseval": 0.05,
        "disjointness": 0.05,
        "subgroup_onb": 1e-3,
        "norm": 1e-3,
        "coset_cross": 0.0,
        "riesz": 0.02,
    },
    "tests": 20,
    "seed": 0,
    "combos": [[0.8, 0.2], [0.5, 0.5]],
    "riesz_windows": [4, 5],
    "sweep": {"M": [8, 16, 32, 64, 128], "subgroup": [3, 4, 5]},
    "vectors": [],
    "outputs": {"report": "report.json", "sweep": "sweep.csv", "gram": False},
}


class ConfigError(ValueError):
    """Carries every violated invariant, one per line."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class RunConfig:
    rank: int
    modulus: int
    weights: tuple[int, ...]
    radii: dict
    kernel: dict
    tolerances: dict
    tests: int
    seed: int
    combos: tuple[tuple[float, float], ...]
    riesz_windows: tuple[int, ...]
    sweep: dict
    vectors: tuple = ()
    outputs: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "modulus": self.modulus,
            "weights": list(self.weights),
            "radii": dict(self.radii),
            "kernel": dict(self.kernel),
            "tolerances": dict(self.tolerances),
            "tests": self.tests,
            "seed": self.seed,
            "combos": [list(p) for p in self.combos],
            "riesz_windows": list(self.riesz_windows),
            "sweep": {k: list(v) for k, v in self.sweep.items()},
            "vectors": list(self.vectors),
            "outputs": dict(self.outputs),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def with_seed(self, seed: int) -> "RunConfig":
        raw = self.to_json()
        raw["seed"] = seed
        return validate_config(raw)


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def validate_config(raw: dict | str | None) -> RunConfig:
    """Fill defaults and check every invariant; all violations are reported together."""
    if isinstance(raw, str):
        raw = json.loads(raw)
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError(["config must be a JSON object"])
    unknown = sorted(set(raw) - set(DEFAULTS))
    problems = [f"unknown key {k!r}" for k in unknown]
    cfg = _merge(DEFAULTS, raw)

    r, N = cfg["rank"], cfg["modulus"]
    if not isinstance(r, int) or r < 2:
        problems.append("rank must be >= 2")
    if not isinstance(N, int) or N < 2:
        problems.append("index must be >= 2")
    w = cfg["weights"]
    if w is None:
        w = [1] + [0] * (max(r, 1) - 1) if isinstance(r, int) else [1]
    w = [int(x) for x in w]
    if isinstance(r, int) and len(w) != r:
        problems.append("weights must have one entry per generator")
    elif isinstance(N, int) and N >= 2 and math.gcd(*w, N) != 1:
        problems.append(f"phi not surjective: gcd(weights, N) = {math.gcd(*w, N)}")

    rad = cfg["radii"]
    for name in ("support", "index", "subgroup", "interior"):
        if not isinstance(rad.get(name), int) or rad[name] < 0:
            problems.append(f"radius {name} must be a nonnegative integer")
    if not any(p.startswith("radius") for p in problems):
        if rad["interior"] + rad["support"] > rad["index"]:
            problems.append(
                f"window inequality violated: interior {rad['interior']} + support {rad['support']} > index {rad['index']}"
            )
    ker = cfg["kernel"]
    if not isinstance(ker.get("M"), int) or ker["M"] < 0:
        problems.append("kernel M must be a nonnegative integer")
    if ker.get("taper") not in ("sharp", "cesaro"):
        problems.append(f"unknown taper {ker.get('taper')!r}")
    if not isinstance(cfg["seed"], int) or not 0 <= cfg["seed"] < 2**64:
        problems.append("seed must be an unsigned 64-bit integer")
    if not isinstance(cfg["tests"], int) or cfg["tests"] < 1:
        problems.append("tests must be a positive integer")
    combos = []
    for pair in cfg["combos"]:
        a2, b2 = float(pair[0]), float(pair[1])
        if a2 < 0 or b2 < 0 or abs(a2 + b2 - 1) > 1e-12:
            problems.append(f"combo {pair} must have |alpha|^2 + |beta|^2 = 1")
        combos.append((a2, b2))
    if not cfg["riesz_windows"]:
        problems.append("riesz_windows must be nonempty")
    if problems:
        raise ConfigError(problems)
    return RunConfig(
        rank=r,
        modulus=N,
        weights=tuple(w),
        radii=dict(rad),
        kernel=dict(ker),
        tolerances=dict(cfg["tolerances"]),
        tests=cfg["tests"],
        seed=cfg["seed"],
        combos=tuple(combos),
        riesz_windows=tuple(int(x) for x in cfg["riesz_windows"]),
        sweep={k: [int(x) for x in v] for k, v in cfg["sweep"].items()},
        vectors=tuple(cfg["vectors"]),
        outputs=dict(cfg["outputs"]),
    )


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return validate_config(json.load(fh))

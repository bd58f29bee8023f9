"""Command line driver: construct, certify, param, riesz, sweep."""
from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config, validate_config
from .construction import (
    SpectralKernel,
    apply_spectral_projection,
    build_disjoint_tuple,
    combine_alpha_beta,
    idempotency_residual,
    line_structure,
    orthogonalize_translates,
    subgroup_onb_residual,
)
from .frame import FrameWindow, disjointness_residual, equivalence_residual, parseval_residual, translate_gram
from .group import CosetStructure, GroupError, ball, power
from .l2 import L2Vector
from .lines import LineVector
from .parametrize import KernelRow, rows_disjoint, rows_equivalent, synthesize, verify_row
from .riesz import SCHEMA, FeichtingerParams, feichtinger_report, riesz_bounds

COMMANDS = ("construct", "certify", "param", "riesz", "sweep")
FLOAT_DIGITS = 12


def canonical(obj):
    """JSON-ready copy with floats cut to a fixed number of significant digits."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [canonical(obj.real), canonical(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        x = float(f"{x:.{FLOAT_DIGITS}g}")
        return 0.0 if x == 0 else x
    if isinstance(obj, np.ndarray):
        return canonical(obj.tolist())
    return obj


def dumps(report: dict) -> str:
    return json.dumps(canonical(report), sort_keys=True, indent=2) + "\n"


def _check(value: float, tol: float) -> dict:
    return {"value": value, "tol": tol, "pass": bool(value <= tol)}


class Run:
    """Shared state for one invocation; everything random comes from one seeded generator."""

    def __init__(self, cfg: RunConfig, workers: int = 1):
        self.cfg = cfg
        self.workers = workers
        self.c = CosetStructure(cfg.rank, cfg.modulus, cfg.weights)
        self.k = SpectralKernel(cfg.modulus, cfg.kernel["M"], cfg.kernel["taper"])
        self.rng = np.random.default_rng(cfg.seed)
        self._orth = None
        self._tuple = None
        self.grams: dict[str, str] = {}
        self.sweep_rows: list[tuple[str, str, float]] = []

    def provenance(self, command: str) -> dict:
        return {
            "command": command,
            "version": __version__,
            "seed": self.cfg.seed,
            "config": self.cfg.to_json(),
            "structure": self.c.to_json(),
            "kernel": self.k.to_json(),
        }

    @property
    def orth(self):
        if self._orth is None:
            self._orth = orthogonalize_translates(self.c, self.k, self.cfg.radii["subgroup"])
        return self._orth

    @property
    def tuple(self):
        if self._tuple is None:
            self._tuple = build_disjoint_tuple(
                self.c,
                self.k,
                self.orth,
                interior=self.cfg.radii["interior"],
                n_tests=self.cfg.tests,
                seed=int(self.rng.integers(2**32)),
            )
        return self._tuple

    # commands

    def construct(self) -> dict:
        tol = self.cfg.tolerances
        o, T = self.orth, self.tuple
        N = self.c.modulus
        interior = self.cfg.radii["interior"]
        onb = subgroup_onb_residual(o.eta, self.c, interior)
        checks = {
            "subgroup_onb": _check(onb, tol["subgroup_onb"]),
            "norm2": _check(abs(o.eta.norm2() - 1 / N), tol["norm"]),
            "coset_cross": _check(T.certificates["coset_cross"], tol["coset_cross"]),
        }
        for cert in T.certificates["members"]:
            checks[f"parseval_{cert['index']}"] = _check(cert["parseval"], tol["parseval"])
        for (i, j), v in sorted(T.disjointness.items()):
            checks[f"disjointness_{i}_{j}"] = _check(v, tol["disjointness"])
        if self.cfg.outputs.get("gram"):
            words = self.c.subgroup_ball(interior)
            self.grams["subgroup"] = translate_gram(o.eta * math.sqrt(N), words).to_csv()
        return {
            "orthogonalization": {
                "size": len(o.words),
                "eig_min": o.eig_min,
                "eig_max": o.eig_max,
                "norm2": o.eta.norm2(),
                "subgroup_onb": onb,
            },
            "tuple": T.to_json(),
            "checks": checks,
        }

    def _vectors(self) -> list[tuple[str, L2Vector]]:
        out = []
        for i, spec in enumerate(self.cfg.vectors):
            out.append((spec.get("label", f"v{i}"), L2Vector.from_json(spec["support"], self.cfg.rank)))
        return out or [("delta_e", L2Vector.delta())]

    def certify(self) -> dict:
        tol = self.cfg.tolerances
        radius = self.cfg.radii["interior"]
        words = ball(radius, self.cfg.rank)
        tests = []
        for _ in range(self.cfg.tests):
            z = self.rng.standard_normal(len(words)) + 1j * self.rng.standard_normal(len(words))
            z /= np.linalg.norm(z)
            tests.append(L2Vector(dict(zip(words, z))))
        W = FrameWindow.whole_group(radius)
        vecs = self._vectors()
        entries, checks = [], {}
        for label, v in vecs:
            pr = parseval_residual(v, W, tests)
            cert = riesz_bounds(v, self.c, self.cfg.radii["subgroup"])
            entries.append({"label": label, "parseval": pr, "riesz": cert.to_json(), "norm2": v.norm2()})
            checks[f"parseval_{label}"] = _check(pr, tol["parseval"])
        for a in range(len(vecs)):
            for b in range(a + 1, len(vecs)):
                d = max(disjointness_residual(vecs[a][1], vecs[b][1], x, y, W) for x, y in zip(tests, tests[1:] + tests[:1]))
                key = f"disjointness_{vecs[a][0]}_{vecs[b][0]}"
                checks[key] = _check(d, tol["disjointness"])
        return {"vectors": entries, "checks": checks}

    def param(self) -> dict:
        tol = self.cfg.tolerances
        T = self.tuple
        c = self.c
        N = c.modulus
        W = FrameWindow.whole_group(self.cfg.radii["interior"])
        Wb = FrameWindow.from_ball(self.cfg.radii["interior"], c.rank)
        L_H = self.cfg.radii["subgroup"]
        rows = []
        # one unit-norm shift row along the line subgroup
        phases = [cmath.exp(2j * math.pi * x) for x in self.rng.uniform(0, 1, N)]
        shifts = [power(c.h0, int(s)) for s in self.rng.integers(-2, 3, N)]
        row = KernelRow.shifts([z / math.sqrt(N) for z in phases], shifts)
        eta = synthesize(row, T.members)
        rows.append(
            {
                "row": row.to_json(),
                "verify_row": verify_row(row),
                "parseval": parseval_residual(eta, W, T.tests),
            }
        )
        combos = []
        for a2, b2 in self.cfg.combos:
            if N < 2:
                break
            alpha, beta = math.sqrt(a2), math.sqrt(b2)
            mix = combine_alpha_beta(T.members[0], T.members[1], alpha, beta)
            turn = cmath.exp(2j * math.pi * float(self.rng.uniform()))
            rotated = combine_alpha_beta(T.members[0], T.members[1], turn * alpha, turn * beta)
            swapped = combine_alpha_beta(T.members[0], T.members[1], beta, alpha)
            u = KernelRow.scalars(alpha, beta, *([0] * (N - 2)))
            v = KernelRow.scalars(beta, alpha, *([0] * (N - 2)))
            cert = riesz_bounds(mix, c, L_H)
            combos.append(
                {
                    "abs2": [a2, b2],
                    "predicted": [(alpha - beta) ** 2 / N, (alpha + beta) ** 2 / N],
                    "riesz": cert.to_json(),
                    "equivalence_rotated": equivalence_residual(mix, rotated, Wb),
                    "equivalence_swapped": equivalence_residual(mix, swapped, Wb),
                    "rows_equivalent_swapped": rows_equivalent(u, v),
                    "rows_disjoint_swapped": rows_disjoint(u, v),
                }
            )
        checks = {"row_parseval": _check(rows[0]["parseval"], tol["parseval"])}
        for e in combos:
            tag = "_".join(f"{x:g}" for x in e["abs2"])
            checks[f"equivalence_rotated_{tag}"] = _check(e["equivalence_rotated"], 1e-9)
            if abs(e["abs2"][0] - e["abs2"][1]) > 1e-12:
                checks[f"riesz_lower_{tag}"] = _check(abs(e["riesz"]["lower"] - e["predicted"][0]), tol["riesz"])
                checks[f"riesz_upper_{tag}"] = _check(abs(e["riesz"]["upper"] - e["predicted"][1]), tol["riesz"])
        return {"rows": rows, "combos": combos, "checks": checks}

    def riesz(self) -> dict:
        combos = tuple((math.sqrt(a2), math.sqrt(b2)) for a2, b2 in self.cfg.combos) if self.c.modulus >= 2 else ()
        params = FeichtingerParams(
            windows=self.cfg.riesz_windows,
            threshold=self.cfg.tolerances["riesz"],
            stability=self.cfg.tolerances["riesz"],
            combos=combos,
            workers=self.workers,
        )
        rep = feichtinger_report(self.tuple, params)
        rep.pop("schema", None)
        rep.pop("provenance", None)
        checks = {}
        for e in rep["entries"]:
            if e["label"].startswith("member"):
                name = e["label"].replace(" ", "_")
                checks[f"{name}_verdict"] = {"value": e["verdict"], "pass": bool(e["verdict"])}
                checks[f"{name}_stable"] = _check(e["nested_drift"], params.stability)
                spread = max(w["coset_spread"] for w in e["windows"])
                checks[f"{name}_coset_spread"] = _check(spread, 1e-10)
        rep["checks"] = checks
        return rep

    def sweep(self) -> dict:
        c = self.c
        out = {"M": [], "subgroup": []}
        delta = LineVector.delta((), line_structure(c))
        for M in self.cfg.sweep.get("M", []):
            k = SpectralKernel(c.modulus, M, self.k.taper)
            idem = idempotency_residual(k, c)
            trace = apply_spectral_projection(k, c, delta).inner(delta)
            row = {"M": M, "idempotency": idem, "tail_norm2": k.tail_norm2(), "trace_error": abs(trace - 1 / c.modulus)}
            out["M"].append(row)
            for name in ("idempotency", "tail_norm2", "trace_error"):
                self.sweep_rows.append((f"M={M}", name, row[name]))
        interior = self.cfg.radii["interior"]
        for L_H in self.cfg.sweep.get("subgroup", []):
            o = orthogonalize_translates(c, self.k, L_H)
            row = {
                "L_H": L_H,
                "eig_min": o.eig_min,
                "eig_max": o.eig_max,
                "norm2_error": abs(o.eta.norm2() - 1 / c.modulus),
                "subgroup_onb": subgroup_onb_residual(o.eta, c, min(interior, L_H)),
            }
            out["subgroup"].append(row)
            for name in ("eig_min", "eig_max", "norm2_error", "subgroup_onb"):
                self.sweep_rows.append((f"L_H={L_H}", name, row[name]))
        idem = [r["idempotency"] for r in out["M"]]
        dec = all(b < a for a, b in zip(idem, idem[1:]))
        out["checks"] = {"idempotency_decreasing": {"value": dec, "pass": dec}}
        return out


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["parameter", "residual_name", "value"])
    for p, name, v in rows:
        w.writerow([p, name, f"{float(v):.{FLOAT_DIGITS}g}"])
    return buf.getvalue()


def run(command: str, cfg: RunConfig, out_dir=None, workers: int = 1) -> tuple[int, dict]:
    """Execute one command; returns (exit status, report).  Files go to out_dir when given."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    r = Run(cfg, workers)
    body = getattr(r, command)()
    checks = body.get("checks", {})
    passed = all(ch.get("pass", False) for ch in checks.values())
    report = {"schema": SCHEMA, "provenance": r.provenance(command), "result": body, "passed": passed}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / cfg.outputs.get("report", "report.json")).write_text(dumps(report))
        if command == "sweep":
            (out / cfg.outputs.get("sweep", "sweep.csv")).write_text(sweep_csv(r.sweep_rows))
        for name, text in r.grams.items():
            (out / f"gram_{name}.csv").write_text(text)
    return (0 if passed else 1), report


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="framelab", description="Parseval frame constructions on free groups.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON config file (defaults are used for missing keys)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("--workers", type=int, default=1)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else validate_config({})
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
    except ConfigError as e:
        for prob in e.problems:
            print(f"config error: {prob}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        status, report = run(args.command, cfg, args.out, max(1, args.workers))
    except (GroupError, ValueError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    for name, ch in sorted(report["result"].get("checks", {}).items()):
        mark = "ok" if ch.get("pass") else "FAIL"
        print(f"{mark:4} {name} {ch.get('value')}")
    return status


if __name__ == "__main__":
    sys.exit(main())

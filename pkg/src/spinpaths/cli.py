"""Command-line entry point: ``spinpaths <suite> [options]``.

Suites
  characters   chi_l(theta) table and orthonormality residual per l
               columns: ell, chi_theta0 .. chi_theta8, orthonormality_residual
  kernel       Euclidean SU(2)/SO(4) kernels per tau
               columns: tau, su2_at_identity, so4_at_identity, semigroup_residual,
               factorization_residual, tail_bound, max_deviation_from_one
  spin-check   covariance and frame identities over seeded random (Lambda, n)
               columns: rep, samples, cov_u, cov_v, orthonormal, idempotent,
               u_vs_v, trace, spin1_projector
  propagator   derivative-path vs on-shell propagator on a grid of separations
               columns: rep, t, x, y, z, sigma, flag, delta_re, delta_im,
               onshell_re, onshell_im, residual
  fock         permutation-sum oracle checks and the vertex sinc peak
               columns: check, n, value_re, value_im, oracle_re, oracle_im, ok

Exit codes: 0 all residuals within tolerance, 1 tolerance breach, 2 usage or
configuration error.  Config files hold ``key = value`` lines; flags win.
``SPINPATHS_THREADS`` caps the worker threads used for grid evaluations.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import fock, kernels, spin
from .groups import LorentzTransform, SO4Element, haar_samples
from .minkowski import ETA, minkowski_dot, unit_timelike_from_velocity
from .representations import (
    SpinLabel,
    character_from_angle,
    character_orthonormality,
    class_convolution,
    spins_up_to,
)

SUITES = ("characters", "kernel", "spin-check", "propagator", "fock")

DEFAULT_TOL = {
    "characters": 1e-10,
    "kernel": 1e-8,
    "spin-check": 1e-9,
    "propagator": 1e-3,
    "fock": 0.0,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    tol: float | None = None
    ell_max: SpinLabel = field(default_factory=lambda: SpinLabel(16))
    nodes: int = 64
    seed: int = 0
    format: str = "csv"
    out: str | None = None
    taus: tuple = (0.3, 0.5, 1.0, 2.0, 5.0)
    samples: int = 100
    reps: tuple = ("scalar", "dirac_spinor", "vector")
    mass: float = 1.0

    def validate(self):
        if self.tol is not None and not self.tol > 0:
            raise UsageError("tolerance must be positive")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if self.nodes < 64:
            raise UsageError("quadrature needs at least 64 nodes")
        if self.samples < 1:
            raise UsageError("samples must be positive")
        if self.mass <= 0:
            raise UsageError("mass must be positive")
        if any(t <= 0 for t in self.taus):
            raise UsageError("tau values must be positive")
        for r in self.reps:
            try:
                spin.get_representation(r)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        return self

    def tolerance(self, suite: str) -> float:
        return DEFAULT_TOL[suite] if self.tol is None else self.tol


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    try:
        if key == "tol":
            return float(raw)
        if key == "ell_max":
            return SpinLabel.of(raw)
        if key in ("nodes", "seed", "samples"):
            return int(raw)
        if key == "mass":
            return float(raw)
        if key == "taus":
            return tuple(float(v) for v in raw.replace(",", " ").split())
        if key == "reps":
            return tuple(v for v in raw.replace(",", " ").split())
        if key in ("format", "out"):
            return raw
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad value for {key}: {raw!r}") from exc
    raise UsageError(f"unknown config key {key!r}")


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        out[key] = _parse_value(key, raw)
    return out


def _threads() -> int:
    raw = os.environ.get("SPINPATHS_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError("SPINPATHS_THREADS must be a positive integer") from None
    if n < 1:
        raise UsageError("SPINPATHS_THREADS must be a positive integer")
    return n


def _ordered_map(fn, items):
    items = list(items)
    n = _threads()
    if n == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Suites; each returns (rows, worst_residual)
# ---------------------------------------------------------------------------

def cmd_characters(cfg: RunConfig):
    thetas = np.linspace(0.0, 2 * np.pi, 9)
    labels = spins_up_to(cfg.ell_max)
    rows, worst = [], 0.0
    for a in labels:
        chi = character_from_angle(a, thetas)
        res = max(abs(character_orthonormality(a, b, cfg.nodes) - (a == b)) for b in labels)
        worst = max(worst, res)
        row = {"ell": str(a)}
        row.update({f"chi_theta{k}": float(c) for k, c in enumerate(chi)})
        row["orthonormality_residual"] = float(res)
        rows.append(row)
    return rows, worst


def cmd_kernel(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    angles = np.linspace(0.0, 2 * np.pi, 13)
    left, right = haar_samples(20, rng), haar_samples(20, rng)
    rows, worst_semi, worst_fact = [], 0.0, 0.0
    for tau in cfg.taus:
        lam = -1j * tau
        K = lambda th, t=tau: kernels.su2_kernel_angle(th, -1j * t, cfg.ell_max).real
        conv = class_convolution(K, K, cfg.ell_max, cfg.nodes)
        semi = float(np.max(np.abs(conv(angles) - K(angles, 2 * tau))))
        fact = 0.0
        for A, B in zip(left, right):
            so4 = kernels.so4_kernel(SO4Element(A, B), lam, cfg.ell_max)
            prod = kernels.su2_kernel(A, lam, cfg.ell_max) * kernels.su2_kernel(B, lam, cfg.ell_max)
            fact = max(fact, abs(so4 - prod) / max(1.0, abs(prod)))
        worst_semi, worst_fact = max(worst_semi, semi), max(worst_fact, fact)
        ident = np.eye(2, dtype=complex)
        rows.append(
            {
                "tau": tau,
                "su2_at_identity": float(kernels.su2_heat_kernel(ident, tau, cfg.ell_max)),
                "so4_at_identity": float(kernels.so4_kernel(SO4Element(ident, ident), lam, cfg.ell_max).real),
                "semigroup_residual": semi,
                "factorization_residual": fact,
                "tail_bound": kernels.su2_truncation_tail_bound(tau, cfg.ell_max),
                "max_deviation_from_one": float(np.max(np.abs(K(angles) - 1.0))),
            }
        )
    tol = cfg.tolerance("kernel")
    # factorization is exact, so it is held to rounding level
    worst = max(worst_semi, worst_fact * tol / 1e-12)
    return rows, worst


def _random_frame_inputs(rng, n):
    out = []
    for _ in range(n):
        L = LorentzTransform.random(rng)
        v = rng.normal(size=3)
        v *= 0.9 * rng.random() / np.linalg.norm(v)
        nvec = unit_timelike_from_velocity(v)
        if rng.random() < 0.25:
            nvec = -nvec
        out.append((L, nvec))
    return out


def cmd_spin_check(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    inputs = _random_frame_inputs(rng, cfg.samples)
    rows, worst = [], 0.0
    for name in cfg.reps:
        rep = spin.get_representation(name)
        acc = dict.fromkeys(("cov_u", "cov_v", "orthonormal", "idempotent", "u_vs_v", "trace", "spin1_projector"), 0.0)
        for L, n in inputs:
            acc["cov_u"] = max(acc["cov_u"], spin.covariance_residual_u(rep, L, n))
            acc["cov_v"] = max(acc["cov_v"], spin.covariance_residual_v(rep, L, n))
            fr = spin.frame_residuals(rep, n)
            acc["orthonormal"] = max(acc["orthonormal"], fr["orthonormal_u"], fr["orthonormal_v"])
            acc["idempotent"] = max(acc["idempotent"], fr["idempotent"], fr["projects_u"])
            acc["u_vs_v"] = max(acc["u_vs_v"], fr["u_vs_v"])
            acc["trace"] = max(acc["trace"], fr["trace"])
            if rep.kind == "vector":
                P = spin.build_spin_frame(rep, n).P_upper
                acc["spin1_projector"] = max(acc["spin1_projector"], float(np.max(np.abs(P - (ETA + np.outer(n, n))))))
        worst = max(worst, *acc.values())
        rows.append({"rep": rep.kind, "samples": len(inputs), **acc})
    return rows, worst


def default_propagator_grid():
    grid = [[t, 0.3, -0.2, 0.1] for t in (1.0, 1.5, 2.0, 3.0, -1.0, -1.5, -2.0, -3.0)]
    grid += [[1.2, 0.2, 0.1, 0.0], [-1.1, 0.0, 0.2, 0.2]]
    grid += [[0.0, r, 0.0, 0.0] for r in (2.0, 3.0, 4.0)]
    grid += [[0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0]]
    return [np.array(g, dtype=float) for g in grid]


def cmd_propagator(cfg: RunConfig):
    grid = default_propagator_grid()
    reps = [r for r in cfg.reps]
    jobs = [(r, dx) for r in reps for dx in grid]

    def run(job):
        name, dx = job
        sigma = float(minkowski_dot(dx, dx))
        row = {"rep": name, "t": dx[0], "x": dx[1], "y": dx[2], "z": dx[3], "sigma": sigma}
        if abs(sigma) < kernels.LIGHT_CONE_ATOL:
            row.update(flag="light_cone", delta_re=math.nan, delta_im=math.nan,
                       onshell_re=math.nan, onshell_im=math.nan, residual=math.nan)
            return row
        a = spin.nonscalar_propagator(name, dx, cfg.mass)
        b = spin.nonscalar_propagator(name, dx, cfg.mass, method="onshell")
        row.update(flag="timelike" if sigma < 0 else "spacelike",
                   delta_re=float(a[0, 0].real), delta_im=float(a[0, 0].imag),
                   onshell_re=float(b[0, 0].real), onshell_im=float(b[0, 0].imag),
                   residual=float(np.max(np.abs(a - b))))
        return row

    rows = _ordered_map(run, jobs)
    worst = max((r["residual"] for r in rows if r["flag"] != "light_cone"), default=0.0)
    return rows, worst


def _fock_labels(rng, n):
    F = fock.ParticleSpec(1, "dirac_spinor", 1.0, "fermion")
    S = fock.ParticleSpec(2, "scalar", 1.2, "boson")
    V = fock.ParticleSpec(3, "vector", 0.8, "boson")
    pool = [F, S, F, V]
    specs = pool[:n]

    def label(order):
        legs = []
        for s in order:
            x = np.array([rng.uniform(-0.3, 0.3), *rng.uniform(-1.5, 1.5, 3)])
            legs.append((x, s, int(rng.integers(s.rep.dimension))))
        return fock.MultiParticleLabel(legs)

    return label(specs), label(list(reversed(specs)))


def cmd_fock(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    rows, failures = [], 0
    for n in range(1, 5):
        bra, ket = _fock_labels(rng, n)
        val = fock.multiparticle_inner_product(bra, ket).value
        ref = fock.brute_force_inner_product(bra, ket)
        ok = val == ref
        failures += not ok
        rows.append({"check": "oracle", "n": n, "value_re": val.real, "value_im": val.imag,
                     "oracle_re": ref.real, "oracle_im": ref.imag, "ok": int(ok)})
    F = fock.ParticleSpec(1, "dirac_spinor", 1.0, "fermion")
    ket = fock.MultiParticleLabel([([0.0, 0.0, 0.0, 0.0], F, 0), ([0.1, 0.5, 0.0, 0.0], F, 2)])
    bra = fock.MultiParticleLabel([([1.2, 0.2, 0.1, 0.0], F, 1), ([1.5, 0.4, -0.3, 0.2], F, 3)])
    a = fock.multiparticle_inner_product(bra, ket).value
    b = fock.multiparticle_inner_product(bra.swapped(0, 1), ket).value
    ok = a == -b
    failures += not ok
    rows.append({"check": "antisymmetry", "n": 2, "value_re": a.real, "value_im": a.imag,
                 "oracle_re": -b.real, "oracle_im": -b.imag, "ok": int(ok)})
    peak, cell, expected = vertex_peak_scan()
    ok = abs(peak - expected) <= cell
    failures += not ok
    rows.append({"check": "sinc_peak", "n": 3, "value_re": peak, "value_im": 0.0,
                 "oracle_re": expected, "oracle_im": 0.0, "ok": int(ok)})
    return rows, float(failures)


def vertex_peak_scan(n_grid: int = 41):
    """Scan the outgoing x-momentum of a scalar 2 -> 1 vertex; return (argmax, cell, balance)."""
    s = fock.ParticleSpec(0, "scalar", 1.0, "boson")
    p1, p2 = np.array([0.3, 0.0, 0.0]), np.array([-0.1, 0.0, 0.0])
    grid = np.linspace(-0.2, 0.6, n_grid)
    vertex = fock.VertexSpec(np.ones((1, 1, 1)), 2, 1)
    ins = [fock.ExternalLeg(p1, s), fock.ExternalLeg(p2, s)]
    # energy is balanced by choosing the outgoing mass for the balance point
    E = np.sqrt(p1 @ p1 + 1) + np.sqrt(p2 @ p2 + 1)
    balance = p1 + p2
    out_mass = float(np.sqrt(E**2 - balance @ balance))
    heavy = fock.ParticleSpec(0, "scalar", out_mass, "boson")
    amps = []
    for px in grid:
        out = [fock.ExternalLeg(np.array([px, 0.0, 0.0]), heavy)]
        amps.append(abs(fock.vertex_amplitude_first_order(ins, out, vertex, T=20.0, L=20.0)).max())
    return float(grid[int(np.argmax(amps))]), float(grid[1] - grid[0]), float(balance[0])


COMMANDS = {
    "characters": cmd_characters,
    "kernel": cmd_kernel,
    "spin-check": cmd_spin_check,
    "propagator": cmd_propagator,
    "fock": cmd_fock,
}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def render_csv(rows) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for r in rows:
        writer.writerow([_fmt(r[k]) for k in header])
    return buf.getvalue()


def _json_value(v) -> str:
    if isinstance(v, (float, np.floating)):
        return "null" if not math.isfinite(v) else format(float(v), ".17g")
    if isinstance(v, (bool, np.bool_, int, np.integer)):
        return str(int(v))
    return json.dumps(str(v))


def render_json(rows) -> str:
    objs = ["{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in r.items()) + "}" for r in rows]
    return "[\n  " + ",\n  ".join(objs) + "\n]\n" if objs else "[]\n"


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinpaths",
        description="Identity suites and tables for the spin path-integral library.",
        epilog=__doc__.split("Suites", 1)[1] if __doc__ else None,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("suite", choices=SUITES)
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--ell-max", dest="ell_max", help="character-sum truncation, e.g. 8 or 7/2")
    parser.add_argument("--tol", type=float, help="override the suite tolerance")
    return parser


def make_config(args) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    for key in ("out", "format", "seed", "tol"):
        val = getattr(args, key)
        if val is not None:
            values[key] = val
    if args.ell_max is not None:
        values["ell_max"] = _parse_value("ell_max", args.ell_max)
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return replace(RunConfig(), **values).validate()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(args)
        _threads()
        rows, worst = COMMANDS[args.suite](cfg)
    except UsageError as exc:
        print(f"spinpaths: error: {exc}", file=sys.stderr)
        return 2
    text = render_json(rows) if cfg.format == "json" else render_csv(rows)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    tol = cfg.tolerance(args.suite)
    breach = not worst <= tol
    if breach:
        print(f"spinpaths: {args.suite}: worst residual {worst:.3g} exceeds tolerance {tol:.3g}", file=sys.stderr)
    return 1 if breach else 0


if __name__ == "__main__":
    sys.exit(main())

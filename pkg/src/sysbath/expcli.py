"""Configuration-driven command-line front end.

Subcommands: trajectory, superop, sweep, verify, dump-spectrum.  A single JSON
config document drives every run; outputs are CSVs with 17-significant-digit
floats plus a manifest with per-point derived seeds and SHA-256 checksums.

Per-point seeding: seed_i = splitmix64(global_seed + (i + 1) * GOLDEN), the
standard splitmix64 stream, so parallel sweeps are reproducible point by point
regardless of scheduling.

Exit codes: 0 success, 1 config error, 2 numerical-check failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import math
import sys
import threading
import time
from pathlib import Path

import numpy as np
from jsonschema import ValidationError, validate

from . import __version__
from .channel import ChannelParams, run_iterations
from .dyson import (
    avoid_db_residual,
    compute_F,
    compute_G,
    conjugation_identity_check,
    dyson_norm_bound,
    multifourier_bound_check,
    multifourier_n1_closed_form,
)
from .models import (
    HamiltonianModel,
    build_annni,
    build_hubbard,
    build_tfim,
    fermionic_coupling_set,
    ground_state,
    pauli_coupling_set,
    thermal_state,
)
from .superop import NonUniqueFixedPointError, build_superoperator, spectral_report

GOLDEN = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["model", "L", "beta", "alpha_list", "sigma_list"],
    "properties": {
        "model": {"enum": ["tfim", "hubbard", "annni"]},
        "model_params": {"type": "object"},
        "L": {"type": "integer", "minimum": 1},
        "beta": {"anyOf": [{"type": "number", "minimum": 0}, {"const": "inf"}]},
        "alpha_list": {"type": "array", "minItems": 1,
                       "items": {"type": "number", "minimum": 0}},
        "sigma_list": {"type": "array", "minItems": 1,
                       "items": {"type": "number", "exclusiveMinimum": 0}},
        "T_factor": {"type": "number", "minimum": 1},
        "omega_interval": {"type": "array", "minItems": 2, "maxItems": 2,
                           "items": {"type": "number"}},
        "n_iter": {"type": "integer", "minimum": 0},
        "mode": {"enum": ["exact", "sampled", "pure"]},
        "dt_divisor": {"type": "number", "minimum": 50},
        "omega_nodes": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "out_dir": {"type": "string"},
        "initial": {"enum": ["maximally_mixed", "zero"]},
        "coupling": {"enum": ["pauli", "fermionic"]},
    },
    "additionalProperties": False,
}

DEFAULTS = {
    "model_params": {},
    "T_factor": 5.0,
    "omega_interval": [0.0, 5.0],
    "n_iter": 50,
    "mode": "exact",
    "dt_divisor": 100,
    "omega_nodes": 64,
    "seed": 0,
    "initial": "maximally_mixed",
}


class ConfigError(ValueError):
    pass


def splitmix64(x: int) -> int:
    """Finalizer of the splitmix64 generator."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def point_seed(global_seed: int, index: int) -> int:
    return splitmix64((global_seed + (index + 1) * GOLDEN) & MASK64)


def fmt(x) -> str:
    """Full-precision decimal rendering (17 significant digits)."""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def load_config(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        validate(raw, CONFIG_SCHEMA)
    except ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc
    cfg = {**DEFAULTS, **raw}
    if cfg["beta"] == "inf":
        cfg["beta"] = math.inf
    return cfg


def build_model(cfg: dict) -> HamiltonianModel:
    mp = cfg["model_params"]
    if cfg["model"] == "tfim":
        return build_tfim(cfg["L"], mp.get("J", 1.0), mp.get("g", 1.2))
    if cfg["model"] == "hubbard":
        return build_hubbard(cfg["L"], mp.get("t", 1.0), mp.get("U", -4.0))
    return build_annni(cfg["L"], mp.get("J1", 2.0), mp.get("J2", 0.6), mp.get("Gamma", 0.2))


def build_coupling(cfg: dict):
    kind = cfg.get("coupling", "fermionic" if cfg["model"] == "hubbard" else "pauli")
    if kind == "fermionic":
        return fermionic_coupling_set(cfg["L"])
    return pauli_coupling_set(cfg["L"])


def build_target(cfg: dict, model: HamiltonianModel):
    if math.isinf(cfg["beta"]):
        return ground_state(model)
    return thermal_state(model, cfg["beta"])


def make_params(cfg: dict, alpha: float, sigma: float) -> ChannelParams:
    return ChannelParams(
        alpha=alpha, sigma=sigma, coupling=build_coupling(cfg), beta=cfg["beta"],
        T=cfg["T_factor"] * sigma, omega_interval=tuple(cfg["omega_interval"]),
        dt=sigma / cfg["dt_divisor"], omega_nodes=cfg["omega_nodes"],
        bath_init="ground" if cfg["mode"] == "pure" else None,
    )


def grid_points(cfg: dict):
    return [(a, s) for s in cfg["sigma_list"] for a in cfg["alpha_list"]]


def initial_state(cfg: dict, model: HamiltonianModel):
    if cfg["mode"] == "pure":
        psi = np.zeros(model.dim, dtype=complex)
        psi[0] = 1.0
        return psi
    if cfg["initial"] == "zero":
        rho = np.zeros((model.dim, model.dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    return np.eye(model.dim, dtype=complex) / model.dim


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out: Path, cfg: dict, seeds: dict, files: list):
    manifest = {
        "artifact_version": __version__,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
        "config": {k: ("inf" if isinstance(v, float) and math.isinf(v) else v)
                   for k, v in cfg.items()},
        "seed_mix": "splitmix64(seed + (index + 1) * 0x9E3779B97F4A7C15)",
        "point_seeds": seeds,
        "files": {name: sha256(out / name) for name in sorted(files)},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def point_name(alpha: float, sigma: float) -> str:
    return f"a{alpha:g}_s{sigma:g}"


def trajectory_csv(record) -> str:
    lines = ["iter,fidelity,infidelity,energy,trace,a_index,omega"]
    for it, fid, energy, tr, a_idx, om in record.rows:
        lines.append(",".join([
            str(it), fmt(fid), fmt(1.0 - fid), fmt(energy), fmt(tr),
            str(a_idx), fmt(om),
        ]))
    return "\n".join(lines) + "\n"


def _run_trajectory_point(cfg, model, target, alpha, sigma, seed):
    params = make_params(cfg, alpha, sigma)
    return run_iterations(initial_state(cfg, model), cfg["n_iter"], cfg["mode"],
                          params, model, seed=seed, target=target)


def cmd_trajectory(cfg: dict, out: Path) -> int:
    model = build_model(cfg)
    target = build_target(cfg, model)
    files, seeds = [], {}
    for i, (alpha, sigma) in enumerate(grid_points(cfg)):
        seed = point_seed(cfg["seed"], i)
        name = f"traj_{point_name(alpha, sigma)}.csv"
        seeds[name] = seed
        rec = _run_trajectory_point(cfg, model, target, alpha, sigma, seed)
        (out / name).write_text(trajectory_csv(rec))
        files.append(name)
    write_manifest(out, cfg, seeds, files)
    return 0


SUPEROP_HEADER = ("alpha,sqrt2_alpha,sigma,gap,residual,mixing_estimate,"
                  "trace_distance,infidelity,non_mixing,flagged")


def superop_rows(cfg: dict, model: HamiltonianModel, target) -> list:
    rows = []
    for alpha, sigma in grid_points(cfg):
        params = make_params(cfg, alpha, sigma)
        s = build_superoperator(params, model)
        try:
            rep = spectral_report(s, target)
            rows.append({
                "alpha": alpha, "sqrt2_alpha": math.sqrt(2) * alpha, "sigma": sigma,
                "gap": float(rep.gap), "residual": float(rep.residual),
                "mixing_estimate": float(rep.mixing_estimate),
                "trace_distance": float(rep.distance_to_target[0]),
                "infidelity": float(rep.distance_to_target[1]),
                "non_mixing": bool(rep.non_mixing), "flagged": False,
                "eigenvalues": rep.eigenvalues,
            })
        except NonUniqueFixedPointError:
            rows.append({
                "alpha": alpha, "sqrt2_alpha": math.sqrt(2) * alpha, "sigma": sigma,
                "gap": math.nan, "residual": math.nan, "mixing_estimate": math.nan,
                "trace_distance": math.nan, "infidelity": math.nan,
                "non_mixing": True, "flagged": True, "eigenvalues": None,
            })
    return rows


def superop_csv(rows: list) -> str:
    lines = [SUPEROP_HEADER]
    for r in rows:
        lines.append(",".join([
            fmt(r["alpha"]), fmt(r["sqrt2_alpha"]), fmt(r["sigma"]), fmt(r["gap"]),
            fmt(r["residual"]), fmt(r["mixing_estimate"]), fmt(r["trace_distance"]),
            fmt(r["infidelity"]), str(int(r["non_mixing"])), str(int(r["flagged"])),
        ]))
    return "\n".join(lines) + "\n"


def cmd_superop(cfg: dict, out: Path) -> int:
    model = build_model(cfg)
    target = build_target(cfg, model)
    rows = superop_rows(cfg, model, target)
    (out / "superop.csv").write_text(superop_csv(rows))
    report = [{k: v for k, v in r.items() if k != "eigenvalues"} for r in rows]
    for r in report:
        for k, v in r.items():
            if isinstance(v, float) and (math.isnan(v) or math.isinf(v)):
                r[k] = str(v)
    (out / "superop_report.json").write_text(json.dumps(report, indent=2) + "\n")
    write_manifest(out, cfg, {}, ["superop.csv", "superop_report.json"])
    return 0


def cmd_dump_spectrum(cfg: dict, out: Path) -> int:
    model = build_model(cfg)
    files = []
    for alpha, sigma in grid_points(cfg):
        params = make_params(cfg, alpha, sigma)
        s = build_superoperator(params, model)
        evals = np.linalg.eigvals(s.matrix)
        evals = evals[np.argsort(-np.abs(evals))]
        name = f"spectrum_{point_name(alpha, sigma)}.csv"
        lines = ["index,re,im,modulus"]
        for i, ev in enumerate(evals):
            lines.append(f"{i},{fmt(ev.real)},{fmt(ev.imag)},{fmt(abs(ev))}")
        (out / name).write_text("\n".join(lines) + "\n")
        files.append(name)
    write_manifest(out, cfg, {}, files)
    return 0


def _load_checkpoint(path: Path) -> dict:
    if not path.exists():
        return {"completed": {}}
    try:
        ck = json.loads(path.read_text())
        assert isinstance(ck["completed"], dict)
        return ck
    except Exception as exc:
        raise IOError(
            f"checkpoint {path} is corrupt ({exc}); delete it to restart the sweep"
        ) from exc


def cmd_sweep(cfg: dict, out: Path, threads: int = 1, resume: bool = False) -> int:
    model = build_model(cfg)
    target = build_target(cfg, model)
    ck_path = out / "sweep_checkpoint.json"
    checkpoint = _load_checkpoint(ck_path) if resume else {"completed": {}}
    if not resume and ck_path.exists():
        raise IOError(f"checkpoint {ck_path} exists; pass --resume or delete it")
    lock = threading.Lock()
    points = grid_points(cfg)
    seeds = {}

    def run_point(i):
        alpha, sigma = points[i]
        name = f"traj_{point_name(alpha, sigma)}.csv"
        seed = point_seed(cfg["seed"], i)
        seeds[name] = seed
        if name in checkpoint["completed"]:
            return name, None
        rec = _run_trajectory_point(cfg, model, target, alpha, sigma, seed)
        (out / name).write_text(trajectory_csv(rec))
        with lock:
            checkpoint["completed"][name] = sha256(out / name)
            tmp = ck_path.with_suffix(".tmp")
            tmp.write_text(json.dumps(checkpoint, indent=2) + "\n")
            tmp.replace(ck_path)
        return name, rec

    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        names = [n for n, _ in pool.map(run_point, range(len(points)))]

    # Deterministic summary built from the per-point CSVs (not in-memory state).
    lines = ["alpha,sigma,ratio,final_fidelity,final_energy,energy_error"]
    for (alpha, sigma), name in zip(points, names):
        last = (out / name).read_text().strip().splitlines()[-1].split(",")
        fid, energy = float(last[1]), float(last[3])
        lines.append(",".join([
            fmt(alpha), fmt(sigma), fmt(alpha / math.sqrt(sigma)), fmt(fid),
            fmt(energy), fmt(abs(energy - target.energy)),
        ]))
    (out / "sweep_summary.csv").write_text("\n".join(lines) + "\n")
    write_manifest(out, cfg, seeds, names + ["sweep_summary.csv"])
    return 0


def verification_suite(seed: int = 0, nodes: int = 128, corrupt_gamma: bool = False) -> list:
    """The lemma checks on small models; returns a list of check dicts."""
    from .models import X, Z

    rng = np.random.default_rng(seed)
    hm = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    hm = (hm + hm.conj().T) / 2
    hm /= np.linalg.norm(hm, 2)
    rand2 = HamiltonianModel(matrix=hm, label="random-2q", sites=2, qubits=2)
    zmodel = HamiltonianModel(matrix=Z.copy(), label="single-z", sites=1, qubits=1)
    checks = []

    r = float(avoid_db_residual(rand2, pauli_coupling_set(2), beta=1.0, sigma=2.0,
                                nodes=nodes, corrupt_gamma=corrupt_gamma))
    r2 = float(avoid_db_residual(rand2, pauli_coupling_set(2), beta=1.0, sigma=2.0,
                                 nodes=2 * nodes, corrupt_gamma=corrupt_gamma))
    checks.append({"name": "avoid_db_n1_residual", "value": r, "bound": 1e-5,
                   "refined_value": r2, "pass": bool(r <= 1e-5)})

    for k in (1, 2):
        d = float(conjugation_identity_check(k, X, zmodel, omega=0.8, beta=1.0,
                                             sigma=2.0, nodes=nodes))
        checks.append({"name": f"conjugation_k{k}", "value": d, "bound": 1e-5,
                       "pass": bool(d <= 1e-5)})

    rngf = np.random.default_rng(seed + 1)
    worst = 0.0
    ok = True
    for _ in range(40):
        n = int(rngf.integers(1, 4))
        sigma = float(rngf.choice([1.0, 2.0]))
        alphas = rngf.uniform(-2, 2, size=n)
        lhs, rhs = multifourier_bound_check(n, alphas, sigma, nodes=96)
        ok &= bool(lhs <= rhs + 1e-12)
        worst = max(worst, float(lhs - rhs))
    checks.append({"name": "multifourier_bound", "value": worst, "bound": 0.0,
                   "pass": bool(ok)})
    lhs, _ = multifourier_bound_check(1, [0.5], 2.0, nodes=96)
    dev = float(abs(lhs - multifourier_n1_closed_form(0.5, 2.0)))
    checks.append({"name": "multifourier_n1_closed_form", "value": dev, "bound": 1e-8,
                   "pass": bool(dev <= 1e-8)})

    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    a /= np.linalg.norm(a, 2)
    for k in (1, 2):
        g = compute_G(k, a, rand2, 0.9, 2.0, 24.0, nodes=64).operator
        f = compute_F(k, a.conj().T, rand2, -0.9, 2.0, 24.0, nodes=64).operator
        dev = float(np.linalg.norm(f - g, 2))
        checks.append({"name": f"fg_adjoint_relation_k{k}", "value": dev,
                       "bound": 1e-8, "pass": bool(dev <= 1e-8)})
        nb = float(dyson_norm_bound(k, 2.0))
        nv = float(np.linalg.norm(g, 2))
        checks.append({"name": f"g_norm_bound_k{k}", "value": nv, "bound": nb,
                       "pass": bool(nv <= nb + 1e-8)})
    return checks


def cmd_verify(cfg: dict, out: Path, corrupt_gamma: bool = False) -> int:
    checks = verification_suite(seed=cfg["seed"], corrupt_gamma=corrupt_gamma)
    report = {"artifact_version": __version__, "checks": checks,
              "all_pass": all(c["pass"] for c in checks)}
    (out / "verify_report.json").write_text(json.dumps(report, indent=2) + "\n")
    return 0 if report["all_pass"] else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sysbath", description="system-bath channel experiments")
    parser.add_argument("command", choices=[
        "trajectory", "superop", "sweep", "verify", "dump-spectrum"])
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--resume", action="store_true")
    parser.add_argument("--corrupt-gamma", action="store_true",
                        help="negative control: corrupt the jump-rate density "
                             "sign in the verify suite")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        out = Path(args.out or cfg.get("out_dir") or ".")
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "trajectory":
            return cmd_trajectory(cfg, out)
        if args.command == "superop":
            return cmd_superop(cfg, out)
        if args.command == "sweep":
            return cmd_sweep(cfg, out, threads=args.threads, resume=args.resume)
        if args.command == "verify":
            return cmd_verify(cfg, out, corrupt_gamma=args.corrupt_gamma)
        if args.command == "dump-spectrum":
            return cmd_dump_spectrum(cfg, out)
        return 1
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (IOError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

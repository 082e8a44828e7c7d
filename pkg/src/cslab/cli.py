"""Command-line harness: config ingestion, experiment execution, report emission.

Subcommands: ``simulate`` (per-engine trajectory CSVs plus a cross-engine
diff summary), ``blowup`` (singularity report for resonant data),
``stability`` (dichotomy report for one datum or a random sweep), ``verify``
(the acceptance suite).  Exit codes: 0 success, 1 config error, 2 blow-up
suspected abort, 3 verification failure.  Outputs contain no timestamps, so
identical configs reproduce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .closed_form import (
    blowup_time,
    hs_norm_closed,
    hs_rate_constant,
    limit_profile,
    pole_asymptotics,
    pole_rate_constant,
    pole_state,
    solution_coeffs,
)
from .finite_gap import FiniteGapData, make_finite_gap, make_resonant, synthesize_coeffs
from .hardy import hs_norm
from .lax import build_lax_matrix
from .resolvent import reconstruct_coeffs, resolvent_state
from .resonance import (
    Classification,
    block_eigen,
    classify,
    measure_resonance_time,
    measure_spectral_radius_bound,
    min_abs_x,
    sigma_spectral_radius,
    stability_iterate_decay,
    unimodular_times_tau,
)
from .timestepper import BlowupSuspectedError, evolve
from .verification import dichotomy_sweep, run_all, sample_datum

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BLOWUP = 2
EXIT_VERIFY = 3


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def complex_to_json(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def complex_from_json(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, dict) and set(obj) <= {"re", "im"}:
        return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    raise ConfigError(f"expected a number or {{re, im}} object, got {obj!r}")


@dataclass(frozen=True)
class DatumSpec:
    """Datum section of a config: resonant triple or the full amplitude tuple."""

    resonant: bool
    theta: float
    m: int
    p: complex
    a: complex | None = None
    c: complex | None = None

    @classmethod
    def from_dict(cls, obj: dict) -> "DatumSpec":
        try:
            resonant = bool(obj.get("resonant", False))
            theta = float(obj.get("theta", 0.0))
            m = int(obj.get("m", 0))
            p = complex_from_json(obj["p"])
            if resonant:
                return cls(True, theta, m, p)
            return cls(False, theta, m, p, complex_from_json(obj["a"]), complex_from_json(obj["c"]))
        except KeyError as exc:
            raise ConfigError(f"datum section missing field {exc}") from exc

    def to_dict(self) -> dict:
        out = {"resonant": self.resonant, "theta": self.theta, "m": self.m, "p": complex_to_json(self.p)}
        if not self.resonant:
            out["a"] = complex_to_json(self.a)
            out["c"] = complex_to_json(self.c)
        return out

    def build(self) -> FiniteGapData:
        if self.resonant:
            return make_resonant(self.theta, self.m, self.p)
        return make_finite_gap(self.theta, self.m, self.p, self.a, self.c)


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    stride: float

    def times(self) -> np.ndarray:
        if self.stride <= 0.0 or self.t_end < self.t_start:
            raise ConfigError(f"empty time grid: {self}")
        n = int(np.floor((self.t_end - self.t_start) / self.stride + 1e-9))
        return self.t_start + self.stride * np.arange(n + 1)


@dataclass(frozen=True)
class ExperimentConfig:
    datum: DatumSpec
    engine: str
    time_grid: TimeGrid
    truncation: int = 256
    oracle_truncation: int = 128
    dt: float = 1e-4
    s_list: tuple[float, ...] = (0.5, 1.0)
    output_dir: str = "out"
    seed: int = 0
    tolerances: tuple[tuple[str, float], ...] = ()

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        try:
            engine = str(obj.get("engine", "all"))
            if engine not in ("closed_form", "explicit", "oracle", "all"):
                raise ConfigError(f"unknown engine {engine!r}")
            grid = obj["time_grid"]
            return cls(
                datum=DatumSpec.from_dict(obj["datum"]),
                engine=engine,
                time_grid=TimeGrid(
                    float(grid["t_start"]), float(grid["t_end"]), float(grid["stride"])
                ),
                truncation=int(obj.get("truncation", 256)),
                oracle_truncation=int(obj.get("oracle_truncation", 128)),
                dt=float(obj.get("dt", 1e-4)),
                s_list=tuple(float(s) for s in obj.get("s_list", (0.5, 1.0))),
                output_dir=str(obj.get("output_dir", "out")),
                seed=int(obj.get("seed", 0)),
                tolerances=tuple(sorted((str(k), float(v)) for k, v in obj.get("tolerances", {}).items())),
            )
        except KeyError as exc:
            raise ConfigError(f"config missing section {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "datum": self.datum.to_dict(),
            "engine": self.engine,
            "time_grid": {
                "t_start": self.time_grid.t_start,
                "t_end": self.time_grid.t_end,
                "stride": self.time_grid.stride,
            },
            "truncation": self.truncation,
            "oracle_truncation": self.oracle_truncation,
            "dt": self.dt,
            "s_list": list(self.s_list),
            "output_dir": self.output_dir,
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
        }


def load_config(path: str) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ExperimentConfig.from_dict(raw)


def _write_csv(path: Path, header: list[str], rows: list[list[float]]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# --- simulate ---

def _closed_form_rows(datum, times, truncation, s_list):
    rows = []
    for t in times:
        coeffs = solution_coeffs(datum, float(t), truncation)
        mass = float(np.sum(np.abs(coeffs.coeffs) ** 2))
        if t > 0.0:
            st = pole_state(datum, float(t))
            pole_cols = [abs(st.alpha1), abs(st.alpha2), st.B1.real, st.B1.imag, st.B2.real, st.B2.imag]
        else:
            st = pole_state(datum, 0.0)
            pole_cols = [abs(st.alpha1), abs(st.alpha2), np.nan, np.nan, np.nan, np.nan]
        hs_cols = [hs_norm_closed(datum, float(t), s) if t > 0.0 else hs_norm(coeffs, s) for s in s_list]
        rows.append([float(t), *pole_cols, *hs_cols, mass])
    header = ["t", "abs_alpha1", "abs_alpha2", "re_B1", "im_B1", "re_B2", "im_B2"]
    header += [f"hs_{s:g}" for s in s_list] + ["I0"]
    return header, rows


def _explicit_rows(datum, times, truncation, s_list):
    u0 = synthesize_coeffs(datum, truncation)
    lax = build_lax_matrix(u0)
    rows = []
    for t in times:
        coeffs = reconstruct_coeffs(resolvent_state(u0, float(t), lax), truncation)
        mass = float(np.sum(np.abs(coeffs.coeffs) ** 2))
        rows.append([float(t), *[hs_norm(coeffs, s) for s in s_list], mass])
    header = ["t"] + [f"hs_{s:g}" for s in s_list] + ["I0"]
    return header, rows, u0, lax


def _oracle_trajectory(datum, config):
    u0 = synthesize_coeffs(datum, config.oracle_truncation)
    output_every = max(1, int(round(config.time_grid.stride / config.dt)))
    return evolve(u0, config.time_grid.t_end, config.dt, output_every=output_every)


def cmd_simulate(config: ExperimentConfig) -> int:
    datum = config.datum.build()
    times = config.time_grid.times()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    resonant = classify(datum) is Classification.RESONANT
    if config.engine == "closed_form" and not resonant:
        raise ConfigError(
            "closed_form engine requires the resonance condition 2a + c = 0; this datum violates it"
        )
    run_closed = config.engine == "closed_form" or (config.engine == "all" and resonant)
    run_explicit = config.engine in ("explicit", "all")
    run_oracle = config.engine in ("oracle", "all")

    if run_closed:
        t_star = blowup_time(datum.p)
        if config.time_grid.t_end >= t_star:
            raise ConfigError(
                f"closed_form engine requires t_end < blow-up time {t_star:.6g}, got {config.time_grid.t_end}"
            )
        header, rows = _closed_form_rows(datum, times, config.truncation, config.s_list)
        _write_csv(out_dir / "closed_form.csv", header, rows)
        print(f"wrote {out_dir / 'closed_form.csv'}")

    u0 = lax = None
    if run_explicit:
        header, rows, u0, lax = _explicit_rows(datum, times, config.truncation, config.s_list)
        _write_csv(out_dir / "explicit.csv", header, rows)
        print(f"wrote {out_dir / 'explicit.csv'}")

    trajectory = None
    if run_oracle:
        trajectory = _oracle_trajectory(datum, config)
        header = ["t"] + [f"hs_{s:g}" for s in config.s_list] + ["I0", "I1", "I2"]
        rows = []
        for t, state, inv in zip(trajectory.times, trajectory.states, trajectory.conserved):
            if t < config.time_grid.t_start - 1e-12:
                continue
            rows.append([float(t), *[hs_norm(state, s) for s in config.s_list], *map(float, inv)])
        _write_csv(out_dir / "oracle.csv", header, rows)
        print(f"wrote {out_dir / 'oracle.csv'}")

    if config.engine == "all":
        summary = _cross_engine_summary(datum, config, times, trajectory, u0, lax)
        _write_json(out_dir / "cross_engine_summary.json", summary)
        print(f"wrote {out_dir / 'cross_engine_summary.json'}")
    return EXIT_OK


def _cross_engine_summary(datum, config, times, trajectory, u0, lax) -> dict:
    resonant = classify(datum) is Classification.RESONANT
    n = config.truncation
    per_time = []
    max_coeff = 0.0
    for t in times:
        if not resonant:
            break
        closed = solution_coeffs(datum, float(t), n)
        explicit = reconstruct_coeffs(resolvent_state(u0, float(t), lax), n)
        diff = float(np.max(np.abs(closed.coeffs - explicit.coeffs)))
        max_coeff = max(max_coeff, diff)
        per_time.append({"t": float(t), "closed_vs_explicit_max_coeff": diff})
    # refinement guard: repeat the worst comparison at twice the truncation
    refinement_ok = True
    if resonant and times.size:
        t_last = float(times[-1])
        closed2 = solution_coeffs(datum, t_last, 2 * n)
        u0_2 = synthesize_coeffs(datum, 2 * n)
        explicit2 = reconstruct_coeffs(resolvent_state(u0_2, t_last), 2 * n)
        diff2 = float(np.max(np.abs(closed2.coeffs - explicit2.coeffs)))
        refinement_ok = bool(diff2 <= 10.0 * max(max_coeff, 1e-12))

    oracle_errs = []
    if trajectory is not None:
        m = config.oracle_truncation
        u0_m = synthesize_coeffs(datum, m)
        lax_m = build_lax_matrix(u0_m)
        for t, state in zip(trajectory.times, trajectory.states):
            if t == 0.0:
                continue
            explicit = reconstruct_coeffs(resolvent_state(u0_m, float(t), lax_m), m)
            rel_ex = float(
                np.linalg.norm(state.coeffs - explicit.coeffs) / np.linalg.norm(explicit.coeffs)
            )
            entry = {"t": float(t), "oracle_vs_explicit_rel_l2": rel_ex}
            if resonant:
                closed = solution_coeffs(datum, float(t), m)
                entry["oracle_vs_closed_rel_l2"] = float(
                    np.linalg.norm(state.coeffs - closed.coeffs) / np.linalg.norm(closed.coeffs)
                )
            oracle_errs.append(entry)
    return {
        "datum": config.datum.to_dict(),
        "truncation": n,
        "oracle_truncation": config.oracle_truncation,
        "closed_vs_explicit_max_coeff": max_coeff if resonant else None,
        "refinement_ok": refinement_ok,
        "per_time": per_time,
        "oracle": oracle_errs,
    }


# --- blowup ---

def cmd_blowup(config: ExperimentConfig) -> int:
    datum = config.datum.build()
    if classify(datum) is not Classification.RESONANT:
        raise ConfigError("blowup report requires the resonance condition 2a + c = 0")
    p = datum.p
    t_star = blowup_time(p)
    c0 = pole_rate_constant(p)
    mass0 = (1.0 + 3.0 * datum.r) / (1.0 + datum.r)
    mass_limit = 2.0 * datum.r / (1.0 + datum.r)

    measured_t = measure_resonance_time(datum, 1.5 * t_star)
    gap_ratio, residue_ratio = pole_asymptotics(datum, t_star - 1e-3)
    u0 = synthesize_coeffs(datum, config.truncation)
    defect = float(np.sum(np.abs(u0.coeffs) ** 2)) - limit_profile(datum).l2_norm_sq

    rate_grid = {}
    rate_at_gap = {}
    for s in config.s_list:
        samples = []
        for gap in (8e-3, 4e-3, 2e-3, 1e-3):
            value = hs_norm_closed(datum, t_star - gap, s) * gap ** (2.0 * s)
            samples.append([gap, value])
        rate_grid[f"{s:g}"] = samples
        rate_at_gap[f"{s:g}"] = samples[-1][1]

    tol = dict(config.tolerances)
    checks = [
        {
            "name": "blowup_time_spectral",
            "expected": t_star,
            "measured": measured_t if measured_t is not None else -1.0,
            "tolerance": tol.get("blowup_time", 1e-8),
        },
        {"name": "pole_gap_ratio", "expected": c0, "measured": gap_ratio, "tolerance": 0.01 * c0},
        {"name": "pole_residue_ratio", "expected": c0, "measured": residue_ratio, "tolerance": 0.01 * c0},
        {"name": "mass_defect", "expected": 1.0, "measured": defect, "tolerance": tol.get("mass_defect", 1e-12)},
    ]
    for s in config.s_list:
        constant = hs_rate_constant(p, s)
        checks.append(
            {
                "name": f"hs_rate_s{s:g}",
                "expected": constant,
                "measured": rate_at_gap[f"{s:g}"],
                "tolerance": 0.02 * constant,
            }
        )
    for c in checks:
        c["pass"] = bool(abs(c["measured"] - c["expected"]) <= c["tolerance"])

    report = {
        "datum": config.datum.to_dict(),
        "analytic": {
            "blowup_time": t_star,
            "curvature_constant": c0,
            "initial_mass_sq": mass0,
            "limit_mass_sq": mass_limit,
            "mass_defect": 1.0,
            "hs_rate_constants": {f"{s:g}": hs_rate_constant(p, s) for s in config.s_list},
        },
        "measured": {
            "blowup_time_spectral": measured_t,
            "pole_gap_ratio": gap_ratio,
            "pole_residue_ratio": residue_ratio,
            "mass_defect": defect,
            "hs_rate_grid": rate_grid,
        },
        "checks": checks,
        "environment": {"truncation": config.truncation, "dt": config.dt, "version": __version__},
    }
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "blowup_report.json", report)
    print(f"wrote {out_dir / 'blowup_report.json'}")
    return EXIT_OK


# --- stability ---

def cmd_stability(config: ExperimentConfig, sweep: int = 0) -> int:
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if sweep:
        rows = dichotomy_sweep(count=sweep, seed=config.seed, truncation=config.truncation)
        bad = sum(0 if r["consistent"] else 1 for r in rows)
        report = {
            "samples": sweep,
            "seed": config.seed,
            "misclassifications": bad,
            "rows": [
                {
                    "p": complex_to_json(r["p"]),
                    "resonant": r["resonant_truth"],
                    "min_abs_x": r["min_abs_x"],
                    "touch_time": r["touch_time"],
                    "radius_bound": r["radius_bound"],
                    "decayed_by_200": r["decayed_by_200"],
                    "consistent": r["consistent"],
                }
                for r in rows
            ],
        }
        _write_json(out_dir / "stability_sweep.json", report)
        print(f"wrote {out_dir / 'stability_sweep.json'} (misclassifications: {bad})")
        return EXIT_OK

    datum = config.datum.build()
    spec = block_eigen(datum)
    resonant = spec.classification is Classification.RESONANT
    grid = np.linspace(0.0, 20.0, 2001)
    bound = measure_spectral_radius_bound(datum, grid)
    report = {
        "datum": config.datum.to_dict(),
        "classification": spec.classification.value,
        "block": {
            "lambda_plus": spec.lambda_plus,
            "lambda_minus": spec.lambda_minus,
            "beta": spec.beta,
            "kappa": spec.kappa,
            "b_plus": spec.b_plus,
            "b_minus": spec.b_minus,
            "delta": spec.delta,
        },
        "min_abs_x": min_abs_x(spec),
        "scan": {"t_max": 20.0, "points": int(grid.size), "max_spectral_radius": bound},
        "environment": {"truncation": config.truncation, "version": __version__},
    }
    if resonant:
        report["resonance_times_physical"] = [unimodular_times_tau(datum, ell) / 2.0 for ell in range(3)]
        report["measured_first_touch"] = measure_resonance_time(datum, 1.5 * blowup_time(datum.p))
        t_decay = report["measured_first_touch"]
        if t_decay is None:
            t_decay = blowup_time(datum.p)
    else:
        report["q0"] = bound
        t_decay = float(grid[int(np.argmax(sigma_spectral_radius(datum, grid)))])
    u0 = synthesize_coeffs(datum, config.truncation)
    norms = stability_iterate_decay(u0, build_lax_matrix(u0), t_decay, 200)
    report["decay"] = {
        "t": t_decay,
        "norms": [float(x) for x in norms[::10]],
        "final": float(norms[-1]),
        "decayed_below_1e-6": bool(norms[-1] <= 1e-6),
    }
    _write_json(out_dir / "stability_report.json", report)
    print(f"wrote {out_dir / 'stability_report.json'}")
    return EXIT_OK


# --- verify ---

def cmd_verify(fast: bool = False, output: str | None = None) -> int:
    report = run_all(fast=fast)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(
            f"{status}  {check.name}: measured {_fmt(check.measured)} "
            f"(expected {_fmt(check.expected)} +- {_fmt(check.tolerance)})"
            + (f"  [{check.note}]" if check.note else "")
        )
    passed = sum(1 for c in report.checks if c.passed)
    print(f"{passed}/{len(report.checks)} checks passed")
    if output:
        _write_json(Path(output), report.to_dict())
        print(f"wrote {output}")
    return EXIT_OK if report.all_passed else EXIT_VERIFY


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cslab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("simulate", "blowup", "stability"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config JSON")
        if name == "stability":
            p.add_argument("--sweep", type=int, default=0, metavar="N",
                           help="run a random dichotomy sweep of N data instead of one datum")
    p = sub.add_parser("verify")
    p.add_argument("--fast", action="store_true", help="skip the long oracle-backed gates")
    p.add_argument("--output", default=None, help="also write the report JSON here")

    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(fast=args.fast, output=args.output)
        config = load_config(args.config)
        if args.command == "simulate":
            return cmd_simulate(config)
        if args.command == "blowup":
            return cmd_blowup(config)
        return cmd_stability(config, sweep=args.sweep)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowupSuspectedError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_BLOWUP


if __name__ == "__main__":
    sys.exit(main())

"""Benchmark harness: coefficient tables, convergence and timing studies,
level-set benchmarks, and stability-region sampling.

Configuration comes from defaults, overridden by a key=value config file,
overridden by command-line flags.  Exit codes: 0 success, 1 configuration
error, 2 partial failures.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import composition, problems, schemes
from .errors import CompoflowError, ConfigError, DomainError
from .fem import (
    FemSpace,
    build_structured_mesh,
    interface_measures,
    l2_error,
    vortex_velocity,
    write_contour_csv,
    write_vtk,
    zalesak_setup,
)
from .integrators import integrate
from .problems import (
    ConvergenceTable,
    LotkaVolterraParams,
    lv_period,
    lv_system,
    relative_invariant_error,
)

SNAPSHOT_TIMES = (0.0, 0.6, 1.0, 2.0, 2.6, 3.4, 3.8, 4.0)


@dataclass
class ExperimentConfig:
    schemes: tuple = ("BE1", "BE2")
    dt0: float = 2e-1
    levels: int = 6
    mesh_n: int = 64
    period: float = 4.0
    supg_c: float = 0.5
    supg_tol: float = 1e-10
    out: str = "out"
    seed: int = 0  # reserved; numerics are deterministic

    def __post_init__(self):
        if self.dt0 <= 0 or self.levels < 1 or self.mesh_n < 1 or self.period <= 0:
            raise ConfigError("steps, sizes and periods must be positive")
        for s in self.schemes:
            if s not in schemes.SCHEMES:
                raise ConfigError(f"unknown scheme label {s!r}")

    def dts(self):
        return [self.dt0 / 2 ** k for k in range(self.levels)]


def load_config_file(path) -> dict:
    """Plain key=value file; '#' starts a comment."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


_CASTS = {
    "dt0": float,
    "levels": int,
    "mesh_n": int,
    "period": float,
    "supg_c": float,
    "supg_tol": float,
    "seed": int,
    "out": str,
    "schemes": lambda s: tuple(x.strip() for x in s.split(",") if x.strip()),
}


def build_config(args, defaults: dict | None = None) -> ExperimentConfig:
    values = dict(defaults or {})
    if getattr(args, "config", None):
        for key, raw in load_config_file(args.config).items():
            if key not in _CASTS:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = _CASTS[key](raw)
    for key in _CASTS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = _CASTS[key](flag) if isinstance(flag, str) else flag
    return ExperimentConfig(**values)


def _fmt(x, digits=6):
    return f"{x:.{digits}g}"


def _write(path, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header)
        for row in rows:
            fh.write(",".join(row) + "\n")


def emit_coefficients(requests, out_path=None):
    """Coefficient table with 17 significant digits and condition residuals."""
    rows = []
    failures = 0
    for p, l in requests:
        try:
            pair = composition.pair_coefficients(p, l)
            rs, rp = composition.validate_conditions([pair.a1, pair.a2], p)
            rows.append(
                [
                    str(p),
                    str(l),
                    _fmt(pair.a1.real, 17),
                    _fmt(pair.a1.imag, 17),
                    _fmt(rs, 3),
                    _fmt(rp, 3),
                    "ok",
                ]
            )
        except CompoflowError as exc:
            failures += 1
            rows.append([str(p), str(l), "", "", "", "", f"error: {exc}"])
    header = "# compoflow coefficients v1\np,l,re_a1,im_a1,residual_sum,residual_power,status\n"
    if out_path:
        _write(out_path, header, rows)
    else:
        sys.stdout.write(header)
        for row in rows:
            sys.stdout.write(",".join(row) + "\n")
    return 2 if failures else 0


def run_ode_convergence(config: ExperimentConfig, params=None):
    """Invariant-error convergence sweep on the predator-prey benchmark."""
    params = params or LotkaVolterraParams()
    system = lv_system(params)
    window = lv_period(params)
    dts = config.dts()
    tables = {}
    failures = 0
    for label in config.schemes:
        errors = []
        used_dts = []
        for dt in dts:
            N = max(1, round(window / dt))
            flow = schemes.build_ode_flow(label, system)
            try:
                rec = integrate(flow, [params.u0, params.v0], 0.0, window, N)
                errors.append(relative_invariant_error(params, rec))
                used_dts.append(window / N)
            except CompoflowError as exc:
                failures += 1
                print(f"[{label}] dt={dt:.3e} failed: {exc}", file=sys.stderr)
        tables[label] = ConvergenceTable(scheme=label, dts=used_dts, errors=errors)
    os.makedirs(config.out, exist_ok=True)
    for label, table in tables.items():
        table.write_csv(os.path.join(config.out, f"ode_converge_{label}.csv"))
    combined = os.path.join(config.out, "ode_converge_all.csv")
    with open(combined, "w", encoding="utf-8") as fh:
        fh.write("# compoflow combined convergence v1\n")
        fh.write("scheme,dt,error,roc\n")
        for label, table in tables.items():
            for dt, err, r in zip(table.dts, table.errors, table.rocs):
                rtxt = "--" if r is None else _fmt(r)
                fh.write(f"{label},{_fmt(dt)},{_fmt(err)},{rtxt}\n")
    return tables, (2 if failures else 0)


def run_cpu_error(config: ExperimentConfig, params=None, repeats=3):
    """Wall clock (median of repeats) versus invariant error per scheme/dt.

    Timing wraps the stepping loop only and runs serially for fairness.
    """
    params = params or LotkaVolterraParams()
    system = lv_system(params)
    window = lv_period(params)
    rows = []
    failures = 0
    for label in config.schemes:
        for dt in config.dts():
            N = max(1, round(window / dt))
            times = []
            error = None
            try:
                for _ in range(repeats):
                    flow = schemes.build_ode_flow(label, system)
                    rec = integrate(flow, [params.u0, params.v0], 0.0, window, N)
                    times.append(rec.wall_clock_seconds)
                    error = relative_invariant_error(params, rec)
            except CompoflowError as exc:
                failures += 1
                print(f"[{label}] dt={dt:.3e} failed: {exc}", file=sys.stderr)
                continue
            rows.append((label, window / N, error, float(np.median(times))))
    os.makedirs(config.out, exist_ok=True)
    _write(
        os.path.join(config.out, "ode_cpu_error.csv"),
        "# compoflow cpu-vs-error v1\nscheme,dt,error,seconds\n",
        [
            [label, _fmt(dt), _fmt(err), _fmt(sec)]
            for label, dt, err, sec in rows
        ],
    )
    return rows, (2 if failures else 0)


def _vortex_reference(space):
    from .fem import signed_distance_circle

    phi0 = signed_distance_circle((0.7, 0.7), 0.15)
    return space.interpolate(phi0)


def run_vortex_convergence(config: ExperimentConfig, snapshots=True):
    """Temporal convergence of the reversible single-vortex benchmark."""
    mesh = build_structured_mesh(config.mesh_n)
    space = FemSpace(mesh)
    velocity = vortex_velocity(config.period)
    ref = _vortex_reference(space)
    os.makedirs(config.out, exist_ok=True)
    rows = []
    failures = 0
    snap_times = [t for t in SNAPSHOT_TIMES if t <= config.period + 1e-12]
    for label in config.schemes:
        for dt in config.dts():
            N = max(1, round(config.period / dt))
            dt_eff = config.period / N
            flow = schemes.build_fem_flow(
                label, space, velocity, C=config.supg_c, tol=config.supg_tol
            )
            emit = snapshots and label == config.schemes[0] and dt == config.dts()[0]
            try:
                y = ref.astype(float)
                start = time.perf_counter()
                next_snap = 0
                if emit:
                    write_vtk(
                        os.path.join(config.out, f"vortex_{label}_t0.vtk"),
                        mesh,
                        {"phi": y},
                    )
                    next_snap = 1
                for n in range(1, N + 1):
                    y = flow.step((n - 1) * dt_eff, y, dt_eff)
                    if emit and next_snap < len(snap_times):
                        if n * dt_eff + 1e-9 >= snap_times[next_snap]:
                            write_vtk(
                                os.path.join(
                                    config.out,
                                    f"vortex_{label}_t{snap_times[next_snap]:g}.vtk",
                                ),
                                mesh,
                                {"phi": y},
                            )
                            next_snap += 1
                elapsed = time.perf_counter() - start
                err = l2_error(y, ref, space)
                rows.append((label, dt_eff, err, elapsed))
            except CompoflowError as exc:
                failures += 1
                print(f"[{label}] dt={dt:.3e} failed: {exc}", file=sys.stderr)
    os.makedirs(config.out, exist_ok=True)
    _write(
        os.path.join(config.out, "vortex_converge.csv"),
        "# compoflow vortex convergence v1\nscheme,dt,l2_error,seconds\n",
        [[label, _fmt(dt), _fmt(err), _fmt(sec)] for label, dt, err, sec in rows],
    )
    return rows, (2 if failures else 0)


def run_zalesak(config: ExperimentConfig):
    """One slotted-disk revolution; reports area drift and final L2 change."""
    mesh = build_structured_mesh(config.mesh_n)
    space = FemSpace(mesh)
    velocity, phi0 = zalesak_setup(config.period)
    label = config.schemes[0]
    dt = config.dts()[0]
    N = max(1, round(config.period / dt))
    dt_eff = config.period / N
    flow = schemes.build_fem_flow(
        label, space, velocity, C=config.supg_c, tol=config.supg_tol
    )
    ref = space.interpolate(phi0)
    area0, contour0 = interface_measures(ref, space)
    os.makedirs(config.out, exist_ok=True)
    write_vtk(os.path.join(config.out, "zalesak_t0.vtk"), mesh, {"phi": ref})
    write_contour_csv(os.path.join(config.out, "zalesak_contour_t0.csv"), contour0)
    snap_times = [t for t in SNAPSHOT_TIMES if 0 < t <= config.period + 1e-12]
    y = ref.astype(float)
    next_snap = 0
    start = time.perf_counter()
    for n in range(1, N + 1):
        y = flow.step((n - 1) * dt_eff, y, dt_eff)
        if next_snap < len(snap_times) and n * dt_eff + 1e-9 >= snap_times[next_snap]:
            write_vtk(
                os.path.join(config.out, f"zalesak_t{snap_times[next_snap]:g}.vtk"),
                mesh,
                {"phi": y},
            )
            next_snap += 1
    elapsed = time.perf_counter() - start
    area_T, contour_T = interface_measures(y, space)
    write_contour_csv(os.path.join(config.out, "zalesak_contour_tT.csv"), contour_T)
    report = {
        "scheme": label,
        "dt": dt_eff,
        "area_initial": area0,
        "area_final": area_T,
        "area_drift_rel": abs(area_T - area0) / area0,
        "l2_change": l2_error(y, ref, space),
        "seconds": elapsed,
    }
    _write(
        os.path.join(config.out, "zalesak_report.csv"),
        "# compoflow zalesak report v1\n" + ",".join(report) + "\n",
        [[_fmt(v) if isinstance(v, float) else str(v) for v in report.values()]],
    )
    return report, y, space, 0


def run_stability_region(
    config: ExperimentConfig,
    re_range=(-6.0, 2.0),
    im_range=(-4.0, 4.0),
    resolution=200,
):
    """Sample |S(z)| <= 1 membership on a rectangular complex grid."""
    xs = np.linspace(re_range[0], re_range[1], resolution)
    ys = np.linspace(im_range[0], im_range[1], resolution)
    results = {}
    os.makedirs(config.out, exist_ok=True)
    for label in config.schemes:
        flow = _stability_flow(label)
        rows = []
        grid = np.empty((resolution, resolution), dtype=bool)
        for j, yv in enumerate(ys):
            for i, xv in enumerate(xs):
                sample = composition.stability_sample(flow, complex(xv, yv))
                grid[j, i] = sample.in_region
                mag = abs(sample.value)
                rows.append(
                    [
                        _fmt(xv),
                        _fmt(yv),
                        "inf" if not math.isfinite(mag) else _fmt(mag),
                        "1" if sample.in_region else "0",
                    ]
                )
        _write(
            os.path.join(config.out, f"stability_{label}.csv"),
            "# compoflow stability region v1\nre_z,im_z,abs_s,in_region\n",
            rows,
        )
        results[label] = grid
    return results, 0


class _StabilityOnlyBase(composition.FlowStep):
    def __init__(self, order, factor):
        self.order = order
        self._factor = factor

    def stability_factors(self, z):
        return [self._factor(z)]


def _stability_flow(label: str) -> composition.FlowStep:
    """Scheme stability evaluator detached from any particular system."""
    family, p, q, symmetric = schemes.SCHEMES[label]
    if family == "BE":
        base = _StabilityOnlyBase(
            1, lambda z: complex(np.inf) if z == 1 else 1.0 / (1.0 - z)
        )
    else:
        base = _StabilityOnlyBase(2, lambda z: 1.0 + z + 0.5 * z * z)
    if symmetric:
        return composition.symmetric_average_step(
            base, composition.pair_coefficients(p, 0)
        )
    return composition.recursive_composition(base, p, q)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="compoflow", description="composition time-integration benchmarks"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", default=None)
        sp.add_argument("--schemes", default=None)
        sp.add_argument("--dt0", type=float, default=None)
        sp.add_argument("--levels", type=int, default=None)
        sp.add_argument("--mesh-n", dest="mesh_n", type=int, default=None)
        sp.add_argument("--period", type=float, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--supg-c", dest="supg_c", type=float, default=None)
        sp.add_argument("--supg-tol", dest="supg_tol", type=float, default=None)

    sp = sub.add_parser("coeffs", help="print composition coefficients")
    sp.add_argument("pairs", nargs="+", help="p,l requests such as 1,0 2,0")
    sp.add_argument("--out", default=None)

    for name in ("ode-converge", "ode-cpu", "vortex", "zalesak", "stability"):
        add_common(sub.add_parser(name))

    args = parser.parse_args(argv)

    try:
        if args.command == "coeffs":
            requests = []
            for token in args.pairs:
                p_s, _, l_s = token.partition(",")
                requests.append((int(p_s), int(l_s or 0)))
            return emit_coefficients(requests, args.out)

        defaults = {}
        if args.command == "vortex":
            defaults = {"schemes": ("BE1", "BE2", "BE4"), "period": 4.0}
        elif args.command == "zalesak":
            defaults = {"schemes": ("BE2",), "dt0": 1e-3, "levels": 1,
                        "mesh_n": 100, "period": 4.0}
        config = build_config(args, defaults)
        if args.command == "ode-converge":
            _, code = run_ode_convergence(config)
        elif args.command == "ode-cpu":
            _, code = run_cpu_error(config)
        elif args.command == "vortex":
            _, code = run_vortex_convergence(config)
        elif args.command == "zalesak":
            *_, code = run_zalesak(config)
        elif args.command == "stability":
            _, code = run_stability_region(config)
        else:  # pragma: no cover
            raise ConfigError(f"unknown command {args.command}")
        return code
    except (ConfigError, DomainError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

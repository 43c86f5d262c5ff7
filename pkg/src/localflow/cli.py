"""Command-line entry point: ``localflow {descriptors,bell,superdet,bohm}``.

Exit codes: 0 success, 2 input error, 3 convention error, 4 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .bell import (
    audit_correlations,
    audit_hv_bound,
    bell_slack,
    coplanar_correlation,
    coplanar_grid,
    coplanar_setting,
    hv_correlation,
    sample_singlet,
    sign_model,
)
from .errors import InputError, LocalFlowError
from .network import Circuit, run_trace
from .output import RunManifest, line_plot_svg, sha256_bytes, sha256_params, write_svg, write_table
from .psi_ensemble import alternating_run, sample_outcomes
from .rng import stream
from .statevector import dual_picture_check

BUNDLED = ("fig1.json", "fig2.json")
DEFAULT_SUPERDET_GRID = "1e-6,1e-4,1e-2,1e-1,1,10,1e3"


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("localflow") / "data" / name))


def _read_input(path_text: str) -> tuple[bytes, str]:
    path = Path(path_text)
    if not path.exists() and path.name in BUNDLED and path.parent == Path("."):
        path = bundled_path(path.name)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path_text}: {exc.strerror}") from None
    return data, str(path)


def _load_json(data: bytes, label: str):
    try:
        return json.loads(data.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{label}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except UnicodeDecodeError as exc:
        raise InputError(f"{label}: not UTF-8 text ({exc.reason})") from None


def _manifest(args, name: str, input_hash: str, tolerances=()) -> RunManifest:
    return RunManifest(name, args.seed, input_hash, Path(args.out), args.format, __version__, tuple(tolerances))


def cmd_descriptors(args) -> list[Path]:
    data, label = _read_input(args.circuit)
    circuit = Circuit.from_dict(_load_json(data, label))
    m = _manifest(args, "descriptors", sha256_bytes(data), [("tol", args.tol)])
    trace = run_trace(circuit, tol=args.tol)
    report = dual_picture_check(circuit, tol=1e-10)
    paths = [
        write_table(m, "trace", ("t", "qubit", "comp", "operator", "support"), trace.rows()),
        write_table(
            m,
            "entanglement",
            ("t", "qubit_i", "qubit_j", "entangled", "max_connected_correlation"),
            trace.entanglement_rows(),
        ),
        write_table(
            m,
            "duality",
            ("t", "qubit", "comp", "heisenberg", "schrodinger", "abs_diff"),
            [(t, q, c, complex(h), complex(s), d) for t, q, c, h, s, d in report.rows],
        ),
        write_table(
            m,
            "duality_summary",
            ("max_abs_diff", "t", "qubit", "comp", "passed"),
            [(report.max_abs_diff, *(report.location or ("", "", "")), report.passed)],
        ),
    ]
    return paths


def _scan_rows(grid, P):
    rows = []
    for tb, tc in grid:
        p_ab, p_ac, p_bc = P(0.0, tb), P(0.0, tc), P(tb, tc)
        slack = 1.0 + p_bc - abs(p_ab - p_ac)
        rows.append((tb, tc, tc - tb, p_ab, p_ac, p_bc, slack))
    return rows


def cmd_bell(args) -> list[Path]:
    if args.samples < 1:
        raise InputError("--samples must be at least 1")
    params = {"resolution": args.resolution, "samples": args.samples, "max_angle": args.max_angle}
    m = _manifest(args, "bell", sha256_params(params), [("tol", args.tol)])
    grid = coplanar_grid(args.resolution, args.max_angle)
    angles = sorted({0.0} | {a for pair in grid for a in pair})
    index = {a: k for k, a in enumerate(angles)}
    hv = sign_model(angles)
    cache: dict = {}

    def sampled(source):
        def P(ta, tb):
            key = (source, ta, tb)
            if key not in cache:
                a, b = coplanar_setting(ta), coplanar_setting(tb)
                rng = stream(args.seed, "bell", source, index[ta], index[tb])
                if source == "singlet":
                    cache[key] = sample_singlet(a, b, args.samples, rng).correlation
                else:
                    cache[key] = sample_outcomes(a, b, args.samples, rng).correlation
            return cache[key]

        return P

    sources = {
        "analytic": coplanar_correlation,
        "singlet": sampled("singlet"),
        "psi_ensemble": sampled("psi_ensemble"),
        "hv": lambda ta, tb: hv_correlation(hv, index[ta], index[tb]),
    }
    cols = ("theta_ab", "theta_ac", "theta_bc", "P_ab", "P_ac", "P_bc", "slack")
    paths = []
    series = {}
    for name, P in sources.items():
        rows = _scan_rows(grid, P)
        paths.append(write_table(m, f"bell_{name}", cols, rows))
        diag = [(r[0], r[6]) for r in rows if r[1] == 2 * r[0]]
        series[name] = ([d[0] for d in diag], [d[1] for d in diag])

    audits = [
        ("hv_exhaustive_3x1", audit_hv_bound(3, 1, seed=args.seed)),
        ("hv_exhaustive_3x4", audit_hv_bound(3, 4, seed=args.seed)),
        ("hv_random_3x4", audit_hv_bound(3, 4, trials=10_000, seed=args.seed, max_exhaustive=0)),
        ("unconstrained_B_3x1", audit_hv_bound(3, 1, seed=args.seed, anticorrelated=False)),
        ("hv_sign_model", audit_correlations(hv.correlation_matrix())),
    ]
    qP = np.array([[coplanar_correlation(a, b) for b in angles] for a in angles])
    audits.append(("quantum", audit_correlations(qP)))
    audit_rows = []
    for name, rep in audits:
        triple = ";".join(str(x) for x in rep.triple)
        audit_rows.append((name, rep.min_slack, triple, rep.n_models, rep.exhaustive, rep.violated))
    paths.append(
        write_table(m, "bell_audit", ("source", "min_slack", "triple", "n_models", "exhaustive", "violated"), audit_rows)
    )
    svg = line_plot_svg(
        series,
        "Bell slack, settings at 0, theta, 2 theta",
        "theta (degrees)",
        "slack",
        comment=m.header_line(),
        hline=0.0,
    )
    paths.append(write_svg(m, "bell_slack", svg))
    return paths


def _parse_grid(text: str) -> list[float]:
    try:
        grid = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"cannot parse grid {text!r}") from None
    if not grid:
        raise InputError("grid must not be empty")
    if min(grid) < 0:
        raise InputError("dt/tau values must be non-negative")
    return grid


def cmd_superdet(args) -> list[Path]:
    if args.samples < 4:
        raise InputError("--samples (number of measurements) must be at least 4")
    grid = _parse_grid(args.grid)
    params = {"grid": grid, "samples": args.samples}
    m = _manifest(args, "superdet", sha256_params(params))
    rows = []
    series: dict = {}
    for k, r in enumerate(grid):
        for mode in ("superdeterministic", "quantum"):
            rng = stream(args.seed, "superdet", mode, k)
            res = alternating_run(r, 1.0, args.samples, rng, mode)
            for basis, st in res.stats.items():
                rows.append((r, mode, basis, st.probability, st.stderr, st.pairs))
                xs, ys = series.setdefault(f"{mode} {basis}", ([], []))
                xs.append(float(np.log10(r)) if r > 0 else -12.0)
                ys.append(st.probability)
    paths = [write_table(m, "superdet", ("dt_over_tau", "mode", "basis", "repeat_prob", "stderr", "n"), rows)]
    svg = line_plot_svg(
        series,
        "Repeat probability, alternating z/x measurements",
        "log10(dt / tau)",
        "repeat probability",
        comment=m.header_line(),
        hline=0.5,
    )
    paths.append(write_svg(m, "superdet", svg))
    return paths


def cmd_bohm(args) -> list[Path]:
    from .pilot_wave.ensemble import histogram_rows
    from .pilot_wave.scenario import Scenario, run_scenario

    data, label = _read_input(args.scenario)
    sc = Scenario.from_dict(_load_json(data, label))
    if args.samples is not None and args.samples < 0:
        raise InputError("--samples must be non-negative")
    m = _manifest(args, "bohm", sha256_bytes(data + f"|samples={args.samples}".encode()))
    res = run_scenario(sc, n_ensemble=args.samples, seed=args.seed)
    paths = [
        write_table(m, "trajectories", ("t", "particle", "x", "v", "branch_weight_at_config"), res.trajectory_rows()),
        write_table(m, "branch_weights", ("t", "branch", "label", "weight"), res.branch_rows()),
    ]
    if res.meiosis is not None:
        mz = res.meiosis
        ov = complex(mz["pointer_overlap"])
        paths.append(
            write_table(
                m,
                "meiosis",
                ("time", "overlap_abs", "overlap_re", "overlap_im", "populated_branch", "pointer_final", "max_rel_velocity_diff"),
                [(mz["time"], abs(ov), ov.real, ov.imag, mz["populated_branch"], mz["pointer_final"], mz["max_rel_velocity_diff"])],
            )
        )
    if res.equivariance is not None:
        eq = res.equivariance
        paths.append(
            write_table(
                m,
                "equivariance",
                ("t", "coordinate", "ks_statistic", "p_value", "critical", "passed"),
                [(r.time, r.coordinate, r.statistic, r.pvalue, r.critical, r.passed) for r in eq.results],
            )
        )
        paths.append(
            write_table(
                m,
                "histogram",
                ("t", "coordinate", "bin_left", "bin_right", "empirical", "theoretical"),
                histogram_rows(sc.wave, eq, sc.bins),
            )
        )
    return paths


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for every random stream")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--tol", type=float, default=1e-9, help="entanglement / violation tolerance")

    p = argparse.ArgumentParser(prog="localflow", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"localflow {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("descriptors", parents=[common], help="descriptor trace of a circuit file")
    d.add_argument("circuit", help="circuit JSON (or the bundled name fig2.json)")
    d.set_defaults(func=cmd_descriptors)

    b = sub.add_parser("bell", parents=[common], help="Bell slack scan over coplanar settings")
    b.add_argument("--resolution", type=int, default=7, help="grid points per angle on [0, max-angle]")
    b.add_argument("--max-angle", type=float, default=180.0)
    b.add_argument("--samples", type=int, default=100_000, help="samples per setting pair")
    b.set_defaults(func=cmd_bell)

    s = sub.add_parser("superdet", parents=[common], help="alternating-measurement repeat probabilities")
    s.add_argument("--grid", default=DEFAULT_SUPERDET_GRID, help="comma-separated dt/tau values")
    s.add_argument("--samples", type=int, default=10_000, help="measurements per run")
    s.set_defaults(func=cmd_superdet)

    h = sub.add_parser("bohm", parents=[common], help="pilot-wave scenario run")
    h.add_argument("scenario", help="scenario JSON (or the bundled name fig1.json)")
    h.add_argument("--samples", type=int, default=None, help="ensemble size (overrides the scenario)")
    h.set_defaults(func=cmd_bohm)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        paths = args.func(args)
    except LocalFlowError as exc:
        print(f"localflow {args.command}: {exc}", file=sys.stderr)
        if getattr(exc, "time", None) is not None:
            print(f"aborted at t={exc.time:.6g}", file=sys.stderr)
        return exc.exit_code
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver: run RK34Q8 and/or plain RK34, write CSV, summaries and figures."""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import svg
from .controller import ToleranceSpec
from .engine import IntegrationError, RunConfig, integrate
from .problem import PROBLEMS, get_problem

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNKNOWN_PROBLEM = 3
EXIT_OUTPUT = 4
EXIT_INTEGRATION = 5

CSV_COLUMNS = ["i", "t", "h", "q34", "p34", "q8", "p8", "gerr_q", "gerr_p", "eps8_q",
               "eps8_p", "delta8_q", "delta8_p", "quenched", "H34", "H8"]
SUMMARY_KEYS = ["nodes", "quenches", "max_gerr_q", "max_gerr_p", "max_traj_err", "max_H_err",
                "max_delta8", "reference_guard_ok", "wall_time_s"]
MODES = {"rkq": [("rkq", True)], "unquenched": [("unquenched", False)],
         "both": [("rkq", True), ("unquenched", False)]}


def sampled_indices(n_nodes: int, subsample: int) -> list[int]:
    """Every ``subsample``-th node from the first, plus the final node."""
    if subsample < 1:
        raise ValueError("subsample must be at least 1")
    idx = list(range(0, n_nodes, subsample))
    if idx and idx[-1] != n_nodes - 1:
        idx.append(n_nodes - 1)
    return idx


def _f(v) -> str:
    return repr(float(v))


def write_trajectory_csv(traj, path, subsample: int = 1) -> int:
    """Write the sampled nodes; returns the number of data rows."""
    idx = sampled_indices(len(traj), subsample)
    gerr = traj.global_error_est
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for i in idx:
            w.writerow([i, _f(traj.t[i]), _f(traj.h[i]), _f(traj.y34[i, 0]), _f(traj.y34[i, 1]),
                        _f(traj.y8[i, 0]), _f(traj.y8[i, 1]), _f(gerr[i, 0]), _f(gerr[i, 1]),
                        _f(traj.eps8[i, 0]), _f(traj.eps8[i, 1]), _f(traj.delta8[i, 0]),
                        _f(traj.delta8[i, 1]), int(traj.quenched[i]), _f(traj.H34[i]),
                        _f(traj.H8[i])])
    return len(idx)


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected header {header}")
    cols = {name: np.array([float(r[k]) for r in body]) for k, name in enumerate(header)}
    cols["i"] = cols["i"].astype(int)
    cols["quenched"] = cols["quenched"].astype(bool)
    return cols


def write_summary(summary: dict, path) -> None:
    lines = []
    for key in SUMMARY_KEYS:
        v = summary[key]
        if isinstance(v, bool):
            v = str(v).lower()
        elif isinstance(v, float):
            v = repr(v)
        lines.append(f"{key} = {v}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_summary(path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if "=" in line:
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


# figures ----------------------------------------------------------------------

def _gerr_abs(cols):
    return np.abs(cols["gerr_q"]), np.abs(cols["gerr_p"])


def make_figures(csvs: dict[str, Path], out_dir: Path, tol: float, h_exact: float,
                 early: float = 40.0) -> list[Path]:
    """Build the four figures from the written CSV files only."""
    data = {name: read_trajectory_csv(p) for name, p in csvs.items()}
    main = data.get("rkq", next(iter(data.values())))
    t = main["t"]
    window = t <= t[0] + early
    qp = svg.Panel("q(t), early periods", "t", "q").add("q", t[window], main["q34"][window])
    pp = svg.Panel("p(t), early periods", "t", "p").add("p", t[window], main["p34"][window])
    phase = svg.Panel("phase portrait", "q", "p").add("trajectory", main["q34"], main["p34"],
                                                     markers=True)
    ham = svg.Panel("numerical Hamiltonian", "t", "H")
    for name, cols in data.items():
        ham.add(name.upper() if name == "rkq" else "RK34", cols["t"], cols["H34"])
    ham.hlines.append((h_exact, "exact"))
    fig1 = svg.figure([qp, pp, phase, ham], cols=2)

    gp = svg.Panel("global error", "t", "|error|", log_y=True)
    tp = svg.Panel("trajectory error (Euclidean)", "t", "error", log_y=True)
    for name, cols in data.items():
        label = "RK34Q8" if name == "rkq" else "RK34"
        eq, ep = _gerr_abs(cols)
        gp.add(f"{label} q", cols["t"], eq)
        gp.add(f"{label} p", cols["t"], ep, dashed=True)
        tp.add(label, cols["t"], np.hypot(eq, ep))
    gp.hlines.append((tol, "tolerance"))
    tp.hlines.append((math.sqrt(2) * tol, "upper bound"))

    dp = svg.Panel("estimated global error of the RK8 reference", "t", "|delta8|", log_y=True)
    dp.add("q", main["t"], np.abs(main["delta8_q"]))
    dp.add("p", main["t"], np.abs(main["delta8_p"]), dashed=True)

    paths = []
    for k, body in enumerate([fig1, svg.figure([gp]), svg.figure([tp]), svg.figure([dp])], 1):
        p = out_dir / f"figure{k}.svg"
        p.write_text(body, encoding="utf-8")
        paths.append(p)
    return paths


# entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rkq", description=__doc__)
    ap.add_argument("--problem", default="pendulum", help="|".join(PROBLEMS))
    ap.add_argument("--mode", choices=sorted(MODES), default="rkq")
    ap.add_argument("--t-end", type=float, default=4000.0)
    ap.add_argument("--tol-abs", type=float, default=1e-6)
    ap.add_argument("--tol-rel", type=float, default=0.0, help="0 disables relative control")
    ap.add_argument("--h0", type=float, default=0.01)
    ap.add_argument("--subsample", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("out"))
    ap.add_argument("--figures", action="store_true")
    ap.add_argument("--max-steps", type=int, default=10_000_000)
    return ap


def run_cli(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        problem = get_problem(args.problem)
    except KeyError:
        print(f"rkq: unknown problem {args.problem!r} (choose from {', '.join(PROBLEMS)})",
              file=sys.stderr)
        return EXIT_UNKNOWN_PROBLEM
    try:
        tol = ToleranceSpec(args.tol_abs, args.tol_rel)
        if args.t_end < problem.t0:
            raise ValueError("--t-end must not precede the initial time")
        base = RunConfig(t_end=args.t_end, tolerance=tol, h0=args.h0,
                         max_steps=args.max_steps, subsample=args.subsample)
    except ValueError as exc:
        print(f"rkq: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        probe = args.out / ".write_test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"rkq: cannot write to {args.out}: {exc}", file=sys.stderr)
        return EXIT_OUTPUT

    csvs = {}
    for name, quench in MODES[args.mode]:
        cfg = RunConfig(**{**base.__dict__, "quench_enabled": quench})
        start = time.perf_counter()
        try:
            traj = integrate(problem, cfg)
        except IntegrationError as exc:
            print(f"rkq: {name} run aborted: {exc}", file=sys.stderr)
            return EXIT_INTEGRATION
        summary = {**traj.summary, "wall_time_s": round(time.perf_counter() - start, 3)}
        try:
            csvs[name] = args.out / f"{name}.csv"
            write_trajectory_csv(traj, csvs[name], args.subsample)
            write_summary(summary, args.out / f"{name}_summary.txt")
        except OSError as exc:
            print(f"rkq: cannot write output: {exc}", file=sys.stderr)
            return EXIT_OUTPUT
        drift = float(traj.H34[-1] - traj.h_exact)
        print(f"{name}: nodes={summary['nodes']} quenches={summary['quenches']} "
              f"max_gerr=({summary['max_gerr_q']:.4g}, {summary['max_gerr_p']:.4g}) "
              f"max_traj_err={summary['max_traj_err']:.4g} final_H_drift={drift:.4g} "
              f"max_delta8={summary['max_delta8']:.3g}")
    if args.figures:
        try:
            make_figures(csvs, args.out, tol.delta_abs, problem.h_exact)
        except OSError as exc:
            print(f"rkq: cannot write figures: {exc}", file=sys.stderr)
            return EXIT_OUTPUT
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()

"""Command-line front end: sweep execution, property verification, single draws.

Exit codes: 0 success, 1 runtime or property failure, 2 usage error.  The
``SPINSHIELD_WORKERS`` environment variable bounds the worker-process count
for sweeps (default: all cores); it can never change the output bytes.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, closedform, oracle
from .model import SpinDims, normalization, sample_coefficients, x_max_schedule
from .sweep import (
    SweepConfig,
    SweepError,
    SweepPoint,
    run_sweep,
    trial_rng,
)

WORKERS_ENV = "SPINSHIELD_WORKERS"

CSV_HEADER = "n,two_s,trials,mean_c,std_c,mean_tau,std_tau,mean_gap,std_gap,mean_abs_gap,min_slack"

_CONFIG_KEYS = (
    "two_s",
    "n",
    "trials",
    "seed",
    "c3",
    "c4",
    "complex",
    "oracle_crosscheck_max_dim",
)

_VERIFY_X_MAXES = (0.5, 0.1, 0.01)
_VERIFY_FAMILIES = (
    "monogamy",
    "oracle-concurrence",
    "oracle-tangle",
    "symmetry",
    "separability",
    "quadratic-gap",
)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# flag and config-file parsing


def _parse_two_s(text: str) -> tuple[int, ...]:
    """Comma list ("2,4,10") or geometric range ("min:max:factor")."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"geometric range must be min:max:factor, got {text!r}")
        try:
            lo, hi, factor = (float(p) for p in parts)
        except ValueError as exc:
            raise UsageError(f"bad geometric range {text!r}: {exc}") from exc
        if lo < 1 or hi < lo or factor <= 1.0:
            raise UsageError("geometric range needs min >= 1, max >= min, factor > 1")
        values = []
        v = lo
        while v <= hi * (1.0 + 1e-12):
            values.append(int(round(v)))
            v *= factor
        return tuple(sorted(set(values)))
    try:
        values = tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad two_s list {text!r}: {exc}") from exc
    return values


def _parse_n(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad n list {text!r}: {exc}") from exc


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise UsageError(f"bad boolean {text!r}")


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"bad complex number {text!r}") from exc


def _read_config_file(path: str) -> dict:
    """Plain `key = value` lines; '#' starts a comment; unknown keys are errors."""
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected `key = value`, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


def _resolve_sweep_config(args) -> SweepConfig:
    fields = {
        "two_s": None,
        "n": None,
        "trials": None,
        "seed": None,
        "c3": None,
        "c4": None,
        "complex": None,
        "oracle_crosscheck_max_dim": None,
    }
    if args.config:
        raw = _read_config_file(args.config)
        if "two_s" in raw:
            fields["two_s"] = _parse_two_s(raw["two_s"])
        if "n" in raw:
            fields["n"] = _parse_n(raw["n"])
        for key in ("trials", "seed", "oracle_crosscheck_max_dim"):
            if key in raw:
                try:
                    fields[key] = int(raw[key])
                except ValueError as exc:
                    raise UsageError(f"config key {key} must be an integer") from exc
        for key in ("c3", "c4"):
            if key in raw:
                fields[key] = _parse_complex(raw[key])
        if "complex" in raw:
            fields["complex"] = _parse_bool(raw["complex"])

    # explicit flags win over file values
    if args.two_s is not None:
        fields["two_s"] = _parse_two_s(args.two_s)
    if args.n is not None:
        fields["n"] = _parse_n(args.n)
    for key in ("trials", "seed", "oracle_crosscheck_max_dim"):
        flag = getattr(args, key)
        if flag is not None:
            fields[key] = flag
    if args.c3 is not None:
        fields["c3"] = _parse_complex(args.c3)
    if args.c4 is not None:
        fields["c4"] = _parse_complex(args.c4)
    if getattr(args, "complex") is not None:
        fields["complex"] = True

    defaults = SweepConfig()
    c3 = fields["c3"] if fields["c3"] is not None else defaults.c[2]
    c4 = fields["c4"] if fields["c4"] is not None else defaults.c[3]
    scale = np.sqrt(abs(c3) ** 2 + abs(c4) ** 2)
    if scale == 0.0:
        raise UsageError("c3 and c4 cannot both be zero")
    try:
        return SweepConfig(
            two_s_values=fields["two_s"] if fields["two_s"] is not None else defaults.two_s_values,
            n_values=fields["n"] if fields["n"] is not None else defaults.n_values,
            trials=fields["trials"] if fields["trials"] is not None else defaults.trials,
            c=(0j, 0j, complex(c3 / scale), complex(c4 / scale)),
            master_seed=fields["seed"] if fields["seed"] is not None else defaults.master_seed,
            complex_mode=bool(fields["complex"]) if fields["complex"] is not None else False,
            oracle_crosscheck_max_dim=(
                fields["oracle_crosscheck_max_dim"]
                if fields["oracle_crosscheck_max_dim"] is not None
                else defaults.oracle_crosscheck_max_dim
            ),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _workers_from_env() -> int | None:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return None
    try:
        workers = int(raw)
    except ValueError as exc:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    if workers < 1:
        raise UsageError(f"{WORKERS_ENV} must be >= 1, got {workers}")
    return workers


# ---------------------------------------------------------------------------
# output files


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a digest; used to fingerprint output files in the manifest."""
    h = 0xCBF29CE484222325
    for byte in data:
        h = ((h ^ byte) * 0x100000001B3) & ((1 << 64) - 1)
    return h


def _fmt(value: float) -> str:
    return repr(float(value))


def _csv_text(points: list[SweepPoint]) -> str:
    lines = [CSV_HEADER]
    for p in points:
        lines.append(
            ",".join(
                [
                    str(p.n),
                    str(p.two_s),
                    str(p.trials),
                    _fmt(p.mean_c),
                    _fmt(p.std_c),
                    _fmt(p.mean_tau),
                    _fmt(p.std_tau),
                    _fmt(p.mean_gap),
                    _fmt(p.std_gap),
                    _fmt(p.mean_abs_gap),
                    _fmt(p.min_monogamy_slack),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _plot_text(n_values: tuple[int, ...]) -> str:
    def series(col: int) -> str:
        return ", \\\n     ".join(
            f'"sweep.csv" skip 1 using (column(1)=={n} ? column(2)/2.0 : 1/0):(column({col})) '
            f'with linespoints title "n={n}"'
            for n in n_values
        )

    return "\n".join(
        [
            "# Mean internal concurrence against the apparatus spin S, one curve per",
            "# perturbation schedule; inset: signed mean gap C^2 - tau.",
            'set datafile separator ","',
            "set logscale x",
            "set multiplot",
            "set size 1,1",
            "set origin 0,0",
            'set xlabel "S"',
            'set ylabel "mean concurrence"',
            "set key bottom right",
            "plot " + series(4),
            "set size 0.42,0.38",
            "set origin 0.52,0.20",
            'set xlabel ""',
            'set ylabel "mean gap"',
            "unset key",
            "plot " + series(8),
            "unset multiplot",
            "",
        ]
    )


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _manifest_text(config: SweepConfig, started: str, finished: str, digests: dict) -> str:
    lines = [
        f"tool = spinshield {__version__}",
        f"two_s_values = {','.join(str(v) for v in config.two_s_values)}",
        f"n_values = {','.join(str(v) for v in config.n_values)}",
        f"trials = {config.trials}",
        f"c1 = {config.c[0]!r}",
        f"c2 = {config.c[1]!r}",
        f"c3 = {config.c[2]!r}",
        f"c4 = {config.c[3]!r}",
        f"master_seed = {config.master_seed}",
        f"complex_mode = {'true' if config.complex_mode else 'false'}",
        f"oracle_crosscheck_max_dim = {config.oracle_crosscheck_max_dim}",
        f"started = {started}",
        f"finished = {finished}",
    ]
    for name in sorted(digests):
        lines.append(f"digest.{name} = {digests[name]:016x}")
    return "\n".join(lines) + "\n"


def _write(path: Path, text: str) -> bytes:
    data = text.encode()
    with open(path, "wb") as fh:
        fh.write(data)
    return data


def cmd_sweep(args) -> int:
    config = _resolve_sweep_config(args)
    workers = _workers_from_env()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    started = _utc_now()
    points = run_sweep(config, workers=workers)
    finished = _utc_now()

    digests = {}
    digests["sweep.csv"] = fnv1a64(_write(out_dir / "sweep.csv", _csv_text(points)))
    digests["plot.gp"] = fnv1a64(_write(out_dir / "plot.gp", _plot_text(config.n_values)))
    _write(out_dir / "manifest.txt", _manifest_text(config, started, finished, digests))
    return 0


# ---------------------------------------------------------------------------
# verify


def _verify_case(master_seed: int, family_index: int, case: int, two_s_max: int):
    """Deterministic case: (dims, x_max, coefficient set) for one family/case pair."""
    two_s = 1 + (case - 1) % two_s_max
    x_max = _VERIFY_X_MAXES[(case - 1) % len(_VERIFY_X_MAXES)]
    rng = trial_rng(master_seed, 1000 * family_index + two_s, case)
    theta = rng.uniform(0.0, np.pi / 2.0)
    phases = np.exp(2j * np.pi * rng.random(2))
    c = (0j, 0j, np.cos(theta) * phases[0], np.sin(theta) * phases[1])
    cs = sample_coefficients(SpinDims(two_s), x_max, x_max, c, rng)
    return two_s, x_max, cs


def _check_monogamy(cs, tol: float) -> bool:
    tau = closedform.one_tangle_closed(cs)
    return closedform.monogamy_slack(cs) >= -1e-12 and tau <= 1.0 + 1e-12


def _check_oracle_concurrence(cs, tol: float) -> bool:
    state = oracle.assemble_state(cs)
    c_oracle = oracle.wootters_concurrence(oracle.reduce(state, "D"))
    return abs(closedform.concurrence_closed(cs) - c_oracle) <= tol


def _check_oracle_tangle(cs, tol: float) -> bool:
    state = oracle.assemble_state(cs)
    tau_oracle = oracle.one_tangle(oracle.reduce(state, "Q1"))
    return abs(closedform.one_tangle_closed(cs) - tau_oracle) <= tol


def _check_symmetry(cs, tol: float) -> bool:
    state = oracle.assemble_state(cs)
    t1 = oracle.one_tangle(oracle.reduce(state, "Q1"))
    t2 = oracle.one_tangle(oracle.reduce(state, "Q2"))
    return abs(t1 - t2) <= tol


def _check_separability(cs, tol: float) -> bool:
    return oracle.separability_structure_check(cs, tol)


def _check_quadratic_gap(cs, tol: float) -> bool:
    def gap(t: float) -> float:
        scaled = cs.scaled(t)
        c = closedform.concurrence_closed(scaled)
        return c * c - closedform.one_tangle_closed(scaled)

    for t in (0.125, 0.0625):
        f_t = gap(t)
        if abs(f_t) >= 1e-14 and not abs(gap(t / 2.0)) <= 0.4 * abs(f_t):
            return False
    return True


_VERIFY_CHECKS = {
    "monogamy": _check_monogamy,
    "oracle-concurrence": _check_oracle_concurrence,
    "oracle-tangle": _check_oracle_tangle,
    "symmetry": _check_symmetry,
    "separability": _check_separability,
    "quadratic-gap": _check_quadratic_gap,
}


def cmd_verify(args) -> int:
    if args.cases < 1:
        raise UsageError("--cases must be >= 1")
    if not 1 <= args.two_s_max <= 63:
        raise UsageError("--two-s-max must be in [1, 63] (dense-oracle gate)")
    if not args.tol > 0:
        raise UsageError("--tol must be positive")

    all_pass = True
    for family_index, family in enumerate(_VERIFY_FAMILIES):
        check = _VERIFY_CHECKS[family]
        passed = 0
        for case in range(1, args.cases + 1):
            two_s, x_max, cs = _verify_case(args.seed, family_index, case, args.two_s_max)
            if check(cs, args.tol):
                passed += 1
            else:
                print(
                    f"FAIL {family}: case={case} two_s={two_s} x_max={x_max} "
                    f"seed={args.seed}",
                    file=sys.stderr,
                )
        print(f"{family}: {passed}/{args.cases}")
        if passed != args.cases:
            all_pass = False
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# single


def _complex_pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def _matrix_pairs(m: np.ndarray) -> list:
    return [[_complex_pair(v) for v in row] for row in m]


def _fmt_c(z: complex) -> str:
    return repr(complex(z))


def cmd_single(args) -> int:
    x_max = x_max_schedule(args.two_s, args.n)
    dims = SpinDims(args.two_s)
    config = SweepConfig()
    rng = trial_rng(args.seed, args.two_s, 1)
    cs = sample_coefficients(dims, x_max, x_max, config.c, rng, args.complex)
    bs = closedform.branch_sums(cs)
    report = closedform.evaluate(cs)
    n_value = normalization(cs)

    with_oracle = dims.m_a * dims.m_b <= oracle.ORACLE_MAX_DIM
    oracle_data = None
    if with_oracle:
        state = oracle.assemble_state(cs)
        rho_d = oracle.reduce(state, "D")
        rho_q1 = oracle.reduce(state, "Q1")
        rho_q2 = oracle.reduce(state, "Q2")
        oracle_data = {
            "C_oracle": oracle.wootters_concurrence(rho_d),
            "tau_oracle_q1": oracle.one_tangle(rho_q1),
            "tau_oracle_q2": oracle.one_tangle(rho_q2),
            "rho_D": rho_d.entries,
            "rho_Q1": rho_q1.entries,
            "rho_M": oracle.reduce(state, "M").entries if dims.m_a * dims.m_b <= 16 else None,
        }

    if args.json:
        payload = {
            "two_s": args.two_s,
            "n": args.n,
            "seed": args.seed,
            "x_max": x_max,
            "m_a": dims.m_a,
            "m_b": dims.m_b,
            "c": [_complex_pair(v) for v in cs.c],
            "x3": [_complex_pair(v) for v in cs.x[2]],
            "x4": [_complex_pair(v) for v in cs.x[3]],
            "y3": [_complex_pair(v) for v in cs.y[2]],
            "y4": [_complex_pair(v) for v in cs.y[3]],
            "N": n_value,
            "X3": bs.X3,
            "X4": bs.X4,
            "Y3": bs.Y3,
            "Y4": bs.Y4,
            "X34": _complex_pair(bs.X34),
            "Y34": _complex_pair(bs.Y34),
            "C": report.concurrence,
            "tau": report.one_tangle,
            "gap": report.gap,
            "slack": report.monogamy_slack,
        }
        if oracle_data is not None:
            payload["C_oracle"] = oracle_data["C_oracle"]
            payload["tau_oracle_q1"] = oracle_data["tau_oracle_q1"]
            payload["tau_oracle_q2"] = oracle_data["tau_oracle_q2"]
            payload["rho_D"] = _matrix_pairs(oracle_data["rho_D"])
            payload["rho_Q1"] = _matrix_pairs(oracle_data["rho_Q1"])
            if oracle_data["rho_M"] is not None:
                payload["rho_M"] = _matrix_pairs(oracle_data["rho_M"])
        print(json.dumps(payload, sort_keys=True, indent=2))
        return 0

    lines = [
        f"two_s = {args.two_s}",
        f"n = {args.n}",
        f"seed = {args.seed}",
        f"x_max = {_fmt(x_max)}",
        f"m_a = {dims.m_a}",
        f"m_b = {dims.m_b}",
        f"c3 = {_fmt_c(cs.c[2])}",
        f"c4 = {_fmt_c(cs.c[3])}",
        "x3 = " + " ".join(_fmt_c(v) for v in cs.x[2]),
        "x4 = " + " ".join(_fmt_c(v) for v in cs.x[3]),
        "y3 = " + " ".join(_fmt_c(v) for v in cs.y[2]),
        "y4 = " + " ".join(_fmt_c(v) for v in cs.y[3]),
        f"N = {_fmt(n_value)}",
        f"X3 = {_fmt(bs.X3)}",
        f"X4 = {_fmt(bs.X4)}",
        f"Y3 = {_fmt(bs.Y3)}",
        f"Y4 = {_fmt(bs.Y4)}",
        f"X34 = {_fmt_c(bs.X34)}",
        f"Y34 = {_fmt_c(bs.Y34)}",
        f"C = {_fmt(report.concurrence)}",
        f"tau = {_fmt(report.one_tangle)}",
        f"gap = {_fmt(report.gap)}",
        f"slack = {_fmt(report.monogamy_slack)}",
    ]
    if oracle_data is not None:
        lines += [
            f"C_oracle = {_fmt(oracle_data['C_oracle'])}",
            f"tau_oracle_q1 = {_fmt(oracle_data['tau_oracle_q1'])}",
            f"tau_oracle_q2 = {_fmt(oracle_data['tau_oracle_q2'])}",
        ]
        for name in ("rho_D", "rho_Q1"):
            for i, row in enumerate(oracle_data[name]):
                lines.append(f"{name}[{i}] = " + " ".join(_fmt_c(v) for v in row))
        if oracle_data["rho_M"] is not None:
            for i, row in enumerate(oracle_data["rho_M"]):
                lines.append(f"rho_M[{i}] = " + " ".join(_fmt_c(v) for v in row))
    print("\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinshield",
        description="Entanglement protection of a qubit pair coupled to two large spins.",
    )
    parser.add_argument("--version", action="version", version=f"spinshield {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run the Monte Carlo sweep and write CSV outputs")
    p_sweep.add_argument("--two-s", dest="two_s", help="comma list or min:max:factor geometric range")
    p_sweep.add_argument("--n", help="comma list of schedule exponents from {1,2,3}")
    p_sweep.add_argument("--trials", type=int, help="draws per gridpoint (default 200)")
    p_sweep.add_argument("--seed", type=int, help="master seed (default 0)")
    p_sweep.add_argument("--c3", help="device weight c3 (default 1/sqrt(2))")
    p_sweep.add_argument("--c4", help="device weight c4 (default 1/sqrt(2))")
    p_sweep.add_argument("--complex", action="store_const", const=True, help="draw complex perturbations")
    p_sweep.add_argument("--oracle-crosscheck-max-dim", dest="oracle_crosscheck_max_dim", type=int,
                         help="run the dense crosscheck when m_a*m_b is at most this (default 64)")
    p_sweep.add_argument("--config", help="key = value config file; flags override it")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the property suites on random draws")
    p_verify.add_argument("--two-s-max", dest="two_s_max", type=int, default=8)
    p_verify.add_argument("--cases", type=int, default=100)
    p_verify.add_argument("--tol", type=float, default=1e-10)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(func=cmd_verify)

    p_single = sub.add_parser("single", help="dump one draw in full")
    p_single.add_argument("--two-s", dest="two_s", type=int, required=True)
    p_single.add_argument("--n", type=int, default=1)
    p_single.add_argument("--seed", type=int, default=0)
    p_single.add_argument("--complex", action="store_true")
    fmt = p_single.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--text", action="store_true")
    p_single.set_defaults(func=cmd_single)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else int(exc.code)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure contract: never a traceback, exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

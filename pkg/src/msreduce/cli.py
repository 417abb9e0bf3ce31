"""Command-line surface.

Subcommands: decompose, effective, eigencompare, propagate, sweep.  Systems
are selected via --model presets or defined inline in a JSON config file;
command-line flags override config values.  Tables are written as CSV with
comment headers, matrices as JSON; report figures are rendered next to the
delimited output unless --no-plot is given.

Exit codes: 0 success, 2 configuration error, 3 numerical contract failure.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
from pathlib import Path

import numpy as np

from . import plotting, reporting
from .dynamics import compare, dark_phase_probe, propagate
from .linalg import ContractViolation
from .models import KINDS, ModelSpec, build, special_case_flags
from .ms_core import BipartiteSystem, dark_states, ms_decompose
from .nondegenerate import effective_model, exact_spectrum, two_step
from .pulses import SHAPES, EnvelopeSpec


class ConfigError(Exception):
    pass


SYSTEM_KEYS = (
    "model",
    "omega_p",
    "omega_s",
    "omega_c",
    "omega_d",
    "shift",
    "shift_g",
    "shift_e",
    "detuning",
    "envelope",
    "amplitude",
    "center",
    "width",
    "system",
)


def _add_system_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; explicit flags override it")
    p.add_argument("--model", choices=[k.replace("_", "-") for k in KINDS])
    p.add_argument("--omega-p", "--op", dest="omega_p", type=float)
    p.add_argument("--omega-s", "--os", dest="omega_s", type=float)
    p.add_argument("--omega-c", "--oc", dest="omega_c", type=float)
    p.add_argument("--omega-d", "--od", dest="omega_d", type=float)
    p.add_argument("--shift", type=float, help="shift parameter of lambda/tripod presets")
    p.add_argument("--shift-g", type=float, help="lower-set shift of double-lambda/diamond")
    p.add_argument("--shift-e", type=float, help="upper-set shift of double-lambda/diamond")
    p.add_argument("--detuning", type=float, help="common detuning (rad/T)")
    p.add_argument("--envelope", choices=SHAPES)
    p.add_argument("--amplitude", type=float)
    p.add_argument("--center", type=float)
    p.add_argument("--width", type=float)
    p.add_argument("-o", "--output", required=True, help="output artifact path")
    p.add_argument("--no-plot", action="store_true", help="skip figure rendering")


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error in {path}, line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config root must be an object, got {type(cfg).__name__}")
    for key in cfg:
        if key not in SYSTEM_KEYS:
            raise ConfigError(f"unknown config field {key!r}")
    return cfg


def _resolve(args: argparse.Namespace) -> dict:
    """Merge the config file with flag overrides (flags win)."""
    cfg = _load_config(getattr(args, "config", None))
    for key in SYSTEM_KEYS:
        if key == "system":
            continue
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if "model" in cfg and cfg["model"]:
        cfg["model"] = str(cfg["model"]).replace("-", "_")
    return cfg


def _complex_entry(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex entry must be [re, im], got {v!r}")
        return complex(v[0], v[1])
    return complex(v)


def _envelope_from(cfg: dict) -> EnvelopeSpec:
    kwargs = {}
    if cfg.get("envelope"):
        kwargs["shape"] = cfg["envelope"]
    for key in ("amplitude", "center", "width"):
        if cfg.get(key) is not None:
            kwargs[key] = cfg[key]
    try:
        return EnvelopeSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_system(cfg: dict) -> tuple[BipartiteSystem, ModelSpec | None]:
    envelope = _envelope_from(cfg)
    if cfg.get("system") is not None:
        sysdef = cfg["system"]
        if not isinstance(sysdef, dict) or "coupling" not in sysdef:
            raise ConfigError("inline 'system' must be an object with a 'coupling' field")
        try:
            coupling = np.array(
                [[_complex_entry(v) for v in row] for row in sysdef["coupling"]], dtype=complex
            )
            sys_obj = BipartiteSystem(
                coupling=coupling,
                delta=float(sysdef.get("delta", cfg.get("detuning", 0.0) or 0.0)),
                shifts_g=sysdef.get("shifts_g"),
                shifts_e=sysdef.get("shifts_e"),
                envelope=envelope,
            )
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid inline system: {exc}") from exc
        return sys_obj, None
    if not cfg.get("model"):
        raise ConfigError("no system selected: pass --model or a config with 'model'/'system'")
    try:
        spec = ModelSpec(
            kind=cfg["model"],
            omega_p=cfg.get("omega_p"),
            omega_s=cfg.get("omega_s"),
            omega_c=cfg.get("omega_c"),
            omega_d=cfg.get("omega_d"),
            shift=cfg.get("shift", 0.0) or 0.0,
            shift_g=cfg.get("shift_g", 0.0) or 0.0,
            shift_e=cfg.get("shift_e", 0.0) or 0.0,
            detuning=cfg.get("detuning", 0.0) or 0.0,
            envelope=envelope,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return build(spec), spec


def _system_at_scale(cfg: dict, delta_value: float) -> BipartiteSystem:
    """System with its shift pattern scaled to magnitude ``delta_value``."""
    cfg = dict(cfg)
    if cfg.get("system") is not None:
        sys0, _ = _build_system(cfg)
        base = sys0.shifts
        top = float(np.max(np.abs(base)))
        if top == 0:
            raise ConfigError("inline system needs a nonzero shift pattern to sweep over")
        direction = base / top
        sys0.shifts_g = delta_value * direction[: sys0.g]
        sys0.shifts_e = delta_value * direction[sys0.g :]
        return sys0
    kind = cfg.get("model")
    if kind in ("lambda", "tripod"):
        cfg["shift"] = delta_value
    else:
        cfg["shift_g"] = -delta_value
        cfg["shift_e"] = delta_value
    sys_obj, _ = _build_system(cfg)
    return sys_obj


def _omega_rms(sys_obj: BipartiteSystem) -> float:
    s = np.linalg.svd(sys_obj.coupling, compute_uv=False)
    return float(sys_obj.envelope.peak * s[0])


def _parse_range(text: str) -> np.ndarray:
    try:
        parts = text.split(":")
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ValueError("count must be >= 1")
            return np.linspace(start, stop, count)
        raise ValueError("expected 'value' or 'start:stop:count'")
    except ValueError as exc:
        raise ConfigError(f"bad range {text!r}: {exc}") from exc


def _parse_initial(text: str, sys_obj: BipartiteSystem) -> np.ndarray:
    n = sys_obj.n
    if text.startswith("dark"):
        try:
            idx = int(text[4:])
        except ValueError as exc:
            raise ConfigError(f"bad initial state {text!r}") from exc
        darks = dark_states(ms_decompose(sys_obj))
        if idx >= len(darks):
            raise ConfigError(f"system has {len(darks)} dark states, asked for {text!r}")
        return darks[idx]
    if "," in text:
        try:
            amps = np.array([complex(x) for x in text.split(",")], dtype=complex)
        except ValueError as exc:
            raise ConfigError(f"bad initial amplitudes {text!r}: {exc}") from exc
        if len(amps) != n:
            raise ConfigError(f"initial state has {len(amps)} amplitudes, system has {n}")
        nrm = np.linalg.norm(amps)
        if nrm == 0:
            raise ConfigError("initial state cannot be the zero vector")
        return amps / nrm
    try:
        idx = int(text)
    except ValueError as exc:
        raise ConfigError(f"bad initial state {text!r}") from exc
    if not 0 <= idx < n:
        raise ConfigError(f"initial state index {idx} out of range for {n} states")
    c0 = np.zeros(n, dtype=complex)
    c0[idx] = 1.0
    return c0


# -- commands ---------------------------------------------------------------


def _cmd_decompose(args) -> int:
    cfg = _resolve(args)
    sys_obj, spec = _build_system(cfg)
    dec = ms_decompose(sys_obj)
    payload = {
        "config": _public_config(cfg),
        "g": dec.g,
        "e": dec.e,
        "rank": dec.rank,
        "U": reporting.matrix_payload(dec.U),
        "A": reporting.matrix_payload(dec.A),
        "B": reporting.matrix_payload(dec.B),
        "omega": reporting.matrix_payload(dec.omega),
        "sigma": reporting.vector_payload(dec.sigma),
        "dark_lower": dec.dark_lower,
        "dark_upper": dec.dark_upper,
        "pairing": [int(i) for i in dec.pairing],
        "dark_states": [reporting.matrix_payload(v) for v in dark_states(dec)],
    }
    if spec is not None:
        payload["flags"] = special_case_flags(spec)
    reporting.write_json(args.output, payload)
    return 0


def _cmd_effective(args) -> int:
    cfg = _resolve(args)
    sys_obj, spec = _build_system(cfg)
    dec = ms_decompose(sys_obj)
    tst = two_step(sys_obj, dec)
    model = effective_model(sys_obj, dec)
    payload = {
        "config": _public_config(cfg),
        "xi": reporting.vector_payload(tst.xi),
        "kappa": reporting.matrix_payload(model.kappa),
        "Q": [None if not np.isfinite(q) else float(q) for q in model.Q],
        "QXi": reporting.vector_payload(model.qxi),
        "H_eff": reporting.matrix_payload(model.h_eff),
        "H_ms": reporting.matrix_payload(model.h_ms),
        "S": reporting.matrix_payload(tst.S),
        "P": reporting.matrix_payload(tst.P),
    }
    if spec is not None:
        payload["flags"] = special_case_flags(spec)
    reporting.write_json(args.output, payload)
    return 0


def _cmd_eigencompare(args) -> int:
    cfg = _resolve(args)
    xs = _parse_range(args.delta_over_rms)
    rows = []
    for x in xs:
        probe = _system_at_scale(cfg, 0.0)
        rms = _omega_rms(probe)
        sys_obj = _system_at_scale(cfg, x * rms)
        dec = ms_decompose(sys_obj)
        tst = two_step(sys_obj, dec)
        model = effective_model(sys_obj, dec)
        exact = exact_spectrum(sys_obj, tst)
        for i in range(sys_obj.n):
            rows.append(
                [x, i, exact.values[i], model.qxi[i], abs(exact.values[i] - model.qxi[i])]
            )
    columns = ["delta_over_rms", "index", "exact", "approx", "abs_error"]
    out = reporting.write_csv(args.output, columns, rows, config=_public_config(cfg))
    if not args.no_plot:
        plotting.plot_eigencompare(columns, np.array(rows), out.with_suffix(".png"))
    return 0


def _cmd_propagate(args) -> int:
    cfg = _resolve(args)
    sys_obj, _ = _build_system(cfg)
    which_list = [w.strip() for w in args.hamiltonians.split(",") if w.strip()]
    for w in which_list:
        if w not in ("full", "effective", "degenerate"):
            raise ConfigError(f"unknown hamiltonian selection {w!r}")
    if not which_list:
        raise ConfigError("empty --hamiltonians list")
    c0 = _parse_initial(args.initial, sys_obj)
    times = np.linspace(0.0, args.t_final, args.samples)
    trajs = {w: propagate(sys_obj, w, c0, times) for w in which_list}
    columns = ["t"] + [f"pop_{w}_{i}" for w in which_list for i in range(sys_obj.n)]
    rows = []
    for k, t in enumerate(times):
        row = [t]
        for w in which_list:
            row.extend(trajs[w].populations[k])
        rows.append(row)
    footer = []
    if len(which_list) >= 2:
        m = compare(trajs[which_list[0]], trajs[which_list[1]])
        footer.append(
            f"max_population_gap({which_list[0]},{which_list[1]}) = "
            + reporting.fmt(m.max_population_gap)
        )
        footer.append(
            f"final_infidelity({which_list[0]},{which_list[1]}) = "
            + reporting.fmt(m.final_infidelity)
        )
    out = reporting.write_csv(args.output, columns, rows, config=_public_config(cfg), footer=footer)
    if not args.no_plot:
        plotting.plot_propagation(columns, np.array(rows), out.with_suffix(".png"))
    return 0


def _cmd_sweep(args) -> int:
    cfg = _resolve(args)
    xs = _parse_range(args.delta_over_rms)
    times = np.linspace(0.0, args.t_final, args.samples)
    rows = []
    for x in xs:
        probe = _system_at_scale(cfg, 0.0)
        rms = _omega_rms(probe)
        sys_obj = _system_at_scale(cfg, x * rms)
        dec = ms_decompose(sys_obj)
        tst = two_step(sys_obj, dec)
        model = effective_model(sys_obj, dec)
        exact = exact_spectrum(sys_obj, tst)
        eig_err = float(np.max(np.abs(exact.values - model.qxi)))
        c0 = _parse_initial(args.initial, sys_obj)
        m = compare(
            propagate(sys_obj, "full", c0, times),
            propagate(sys_obj, "effective", c0, times),
        )
        rows.append([x, eig_err, m.max_population_gap])
    columns = ["delta_over_rms", "max_eig_error", "max_pop_gap"]
    footer = []
    arr = np.array(rows)
    for j, name in enumerate(columns[1:], start=1):
        m = (arr[:, 0] > 0) & (arr[:, j] > 0)
        if np.sum(m) >= 2:
            slope = float(np.polyfit(np.log(arr[m, 0]), np.log(arr[m, j]), 1)[0])
            footer.append(f"loglog_slope_{name} = " + reporting.fmt(slope))
    out = reporting.write_csv(args.output, columns, rows, config=_public_config(cfg), footer=footer)
    if not args.no_plot:
        plotting.plot_sweep(columns, arr, out.with_suffix(".png"))
    return 0


def _public_config(cfg: dict) -> dict:
    return {k: v for k, v in cfg.items() if v is not None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msreduce",
        description="Reduce bipartite multistate systems to independent two-state pairs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="write the degenerate decomposition")
    _add_system_args(p)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("effective", help="write the first-order effective model")
    _add_system_args(p)
    p.set_defaults(func=_cmd_effective)

    p = sub.add_parser("eigencompare", help="exact vs approximated eigenvalues over a shift sweep")
    _add_system_args(p)
    p.add_argument(
        "--delta-over-rms",
        required=True,
        help="shift magnitude(s) relative to the rms coupling: 'x' or 'start:stop:count'",
    )
    p.set_defaults(func=_cmd_eigencompare)

    p = sub.add_parser("propagate", help="population time series")
    _add_system_args(p)
    p.add_argument("--t-final", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--initial", default="0", help="state index, 'darkN', or comma amplitudes")
    p.add_argument(
        "--hamiltonians",
        default="full,effective",
        help="comma list from full,effective,degenerate",
    )
    p.set_defaults(func=_cmd_propagate)

    p = sub.add_parser("sweep", help="eigenvalue and population errors vs shift magnitude")
    _add_system_args(p)
    p.add_argument("--delta-over-rms", required=True)
    p.add_argument("--t-final", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--initial", default="0")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2
    except ContractViolation as exc:
        print(f"numerical contract failure: {exc}", file=_sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())

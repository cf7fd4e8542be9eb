"""Command-line front end: stadion envelope | unfold | dioph | spectrum | swf | residual | report."""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from fractions import Fraction
from typing import Optional

import click
import numpy as np

from . import diophantine as dio
from . import semiclassics as sc
from . import stadium_geometry as geo
from . import unfolding as unf
from .presets import PRESET_NAMES, CaseConfig, ConfigError, load_case, load_case_file

DEFAULT_ZCAP = 2_000_000_000


# ---------------------------------------------------------------- deterministic emitters

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return "%.17g" % x


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with floats at 17 significant digits and a fixed key order."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        obj = list(obj)
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        click.echo(text)


def _fail(exc: Exception, code: int = 2):
    click.echo(dumps({"error": type(exc).__name__, "message": str(exc)}), err=True)
    sys.exit(code)


# ---------------------------------------------------------------- configuration

def _resolve_case(case: Optional[str], config: Optional[str], L: Optional[str]) -> tuple[CaseConfig, dict]:
    extra: dict = {}
    if config:
        try:
            with open(config, encoding="utf-8") as fh:
                extra = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config!r}: {exc}") from exc
        if not isinstance(extra, dict):
            raise ConfigError("config must be a JSON object")
        cfg = load_case_file(config)
    elif case:
        cfg = load_case(case)
    else:
        raise ConfigError("give --case or --config")
    if L is not None:
        try:
            Lv = Fraction(L)
        except ValueError as exc:
            raise ConfigError(f"invalid L {L!r}") from exc
        if Lv <= 0:
            raise ConfigError("L must be positive")
        cfg = dataclasses.replace(cfg, stadium=geo.StadiumSpec(Lv, cfg.name))
    return cfg, extra


def _L(cfg: CaseConfig) -> Fraction:
    L = cfg.stadium.exact_L
    if L is None:
        raise ConfigError("the unfolding needs a rational L")
    return L


def _units(cfg: CaseConfig) -> tuple:
    if cfg.tangent_units is None:
        raise ConfigError("the unfolding needs tangent angles that are multiples of pi/16")
    return cfg.tangent_units


def _irrationals(cfg: CaseConfig) -> list:
    if not cfg.irrationals:
        raise ConfigError(f"case {cfg.name} declares no irrationals to approximate")
    return dio.case_irrationals(cfg.irrationals)


def _approximation(cfg: CaseConfig, accuracy: Optional[float], Z: Optional[int], zcap: int,
                   threads: Optional[int]) -> dio.Approximation:
    X = _irrationals(cfg)
    if Z is not None:
        qs, errs = dio.exact_errors(X, Z)
        worst = float(max(abs(e) for e in errs))
        eps = accuracy if accuracy is not None else worst
        return dio.Approximation(Z, qs, worst, eps, None, [float(e) for e in errs])
    if accuracy is None:
        raise ConfigError("give --accuracy or --Z")
    if not 0 < accuracy:
        raise ConfigError("accuracy must be positive")
    res = dio.min_Z_for_accuracy(X, accuracy, zcap, threads)
    if not res.found:
        raise ConfigError(f"no Z <= {zcap} reaches accuracy {accuracy:g}")
    return res


def _spec(cfg: CaseConfig, appr: dio.Approximation, m: int, n: int) -> sc.SwfSpec:
    units = _units(cfg)
    preset = cfg.name in PRESET_NAMES and units == load_case(cfg.name).tangent_units
    return sc.SwfSpec(cfg.name, appr.Z, sc.ModeNumbers(m, n), _L(cfg), appr.eps, appr,
                      None if preset else units)


# ---------------------------------------------------------------- payload builders

def envelope_payload(cfg: CaseConfig, samples: int = 10000) -> dict:
    env = geo.build_envelope(cfg.stadium, cfg.tangents)
    bound = geo.envelope_accuracy_bound(tangents=cfg.tangents)
    pts = cfg.stadium.boundary_samples(samples)
    out = {"case": cfg.name, "L": float(cfg.stadium.L)}
    out.update(env.to_json())
    out["interior_angles_over_pi"] = [float(a) / math.pi for a in env.interior_angles]
    out["epsilon_pol"] = bound.epsilon_pol
    out["max_tangent_gap"] = bound.spacing
    out["containment_violation"] = geo.containment_violation(env, pts)
    out["max_tangency_defect"] = max(geo.tangency_defects(env))
    out["tangency_on_sides"] = geo.tangency_on_sides(env)
    out["sampled_deformation_sup"] = geo.sampled_deformation_sup(cfg.stadium, env, min(samples, 4000))
    return out


def unfold_payload(cfg: CaseConfig, with_periods: bool = True) -> dict:
    epp = sc.case_pattern(cfg.name, _L(cfg), _units(cfg))
    periods = unf.enumerate_periods(epp)
    summary = unf.summarize(epp, periods)
    out = {"case": cfg.name, "tangent_units": list(_units(cfg))}
    out.update(summary.to_json())
    out["polygon"] = {"labels": list(epp.polygon.labels), "angle_units": list(epp.polygon.angle_units),
                      "vertices": [[float(x), float(y)] for x, y in epp.polygon.vertices]}
    out["copies"] = len(epp.copies)
    if with_periods:
        rows = []
        for p in periods:
            ix, iy = p.I_constants()
            rows.append({"label": p.label, "vector": list(p.vector_float), "a_x": p.a_x.to_json(),
                         "a_y": p.a_y.to_json(), "I_x": ix, "I_y": iy, "multiplicity": p.multiplicity})
        out["periods"] = rows
        out["epp"] = epp.to_json()
    return out


def dioph_row(cfg: CaseConfig, appr: dio.Approximation) -> dict:
    n = len(cfg.irrationals)
    return {"accuracy": appr.eps, "N": dio.descriptive_N(appr.eps, n), "Z": appr.Z,
            **{f"q{k + 1}": q for k, q in enumerate(appr.q)}, "max_error": appr.max_error}


def spectrum_rows(Z: int, mmax: int) -> list[dict]:
    """Levels in the sector 0 <= m <= n <= mmax, n >= 1, sorted by energy."""
    rows = []
    for n in range(1, mmax + 1):
        for m in range(0, n + 1):
            mode = sc.ModeNumbers(m, n)
            e2 = sc.energy_over_pi2(Z, mode)
            rows.append({"m": m, "n": n, "E_over_8pi2Z2": m * m + n * n, "E_over_pi2": e2, "E": sc.energy(Z, mode),
                         "degenerate": m == n})
    rows.sort(key=lambda r: (r["E_over_pi2"], r["m"], r["n"]))
    return rows


def residual_payload(model: sc.SwfModel, eps: float, samples: int, diag_samples: int, nodal_samples: int) -> dict:
    sides = sc.boundary_residual(model, eps, samples)
    out = {"case": model.case, "Z": model.Z, "m": model.mode.m, "n": model.mode.n, "eps": eps,
           "energy": model.energy, "degenerate": model.degenerate,
           "boundary": [{"side": r.side, "max_abs": r.max_abs, "J_x": r.J_x, "J_y": r.J_y, "bound": r.bound,
                         "tight_bound": r.tight_bound, "pair_sum": r.pair_sum, "ok": r.ok,
                         "construction_zero": r.construction_zero} for r in sides]}
    if model.case == "A":
        try:
            diags = sc.diagonal_residual(model, eps=eps, samples=diag_samples)
            out["diagonals"] = [{"x": float(d.x), "x_exact": d.x.to_json(), "kind": d.kind, "max_abs": d.max_abs,
                                 "bound": d.bound, "printed_bound": d.printed_bound,
                                 "corrected_bound": d.corrected_bound, "ok": d.ok} for d in diags]
        except sc.DiagonalNotRepresentableError as exc:
            out["diagonals_error"] = str(exc)
    if nodal_samples > 0:
        out["accuracy"] = sc.spectrum_accuracy_report(model, eps, nodal_samples).to_json()
    return out


# ---------------------------------------------------------------- commands

_case_opt = click.option("--case", "case", type=str, default=None, help="Preset A, B or C.")
_config_opt = click.option("--config", type=click.Path(dir_okay=False), default=None, help="JSON case file.")
_L_opt = click.option("--L", "L", type=str, default=None, help="Flat half-length (rational, default 1).")
_out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (stdout if omitted).")
_threads_opt = click.option("--threads", type=int, default=None, help="Worker threads (falls back to STADION_THREADS).")
_acc_opt = click.option("--accuracy", type=float, default=None, help="Target max ||Z X_k||.")
_Z_opt = click.option("--Z", "Z", type=int, default=None, help="Use this multiplier instead of searching.")
_zcap_opt = click.option("--zcap", type=int, default=None, help="Largest Z scanned.")


def _zcap(extra: dict, zcap: Optional[int]) -> int:
    return int(zcap if zcap is not None else extra.get("zcap", DEFAULT_ZCAP))


def _accuracy(extra: dict, accuracy: Optional[float]) -> Optional[float]:
    return accuracy if accuracy is not None else extra.get("accuracy")


@click.group()
def main():
    """Semiclassical quantization of the polygon-enveloped stadium billiard."""


@main.command()
@_case_opt
@_config_opt
@_L_opt
@_out_opt
@click.option("--samples", type=int, default=10000, show_default=True)
def envelope(case, config, L, out, samples):
    """Polygon envelope: vertices, angles, containment and tangency checks, epsilon_pol."""
    try:
        cfg, _ = _resolve_case(case, config, L)
        _emit(dumps(envelope_payload(cfg, samples)), out)
    except (ConfigError, ValueError, ArithmeticError) as exc:
        _fail(exc)


@main.command()
@_case_opt
@_config_opt
@_L_opt
@_out_opt
def unfold(case, config, L, out):
    """Elementary polygon pattern, genus and period table."""
    try:
        cfg, _ = _resolve_case(case, config, L)
        _emit(dumps(unfold_payload(cfg)), out)
    except (ConfigError, ValueError, ArithmeticError, RuntimeError) as exc:
        _fail(exc)


@main.command()
@_case_opt
@_config_opt
@_acc_opt
@click.option("--N", "N", type=int, default=None, help="Dirichlet mode: smallest Z <= N with errors < N^(-1/n).")
@_zcap_opt
@_threads_opt
@_out_opt
def dioph(case, config, accuracy, N, zcap, threads, out):
    """Smallest Z approximating the case irrationals; one CSV row."""
    try:
        cfg, extra = _resolve_case(case, config, None)
        X = _irrationals(cfg)
        if N is not None:
            appr = dio.dirichlet_search(X, N, threads)
            if not appr.found:
                raise ConfigError(f"no Z <= {N} meets the Dirichlet bound")
        else:
            appr = _approximation(cfg, _accuracy(extra, accuracy), None, _zcap(extra, zcap), threads)
        row = dioph_row(cfg, appr)
        if N is not None:
            row["N"] = N
        head = ",".join(row)
        vals = ",".join(_fmt_float(v) if isinstance(v, float) else str(v) for v in row.values())
        _emit(head + "\n" + vals, out)
    except (ConfigError, ValueError) as exc:
        _fail(exc)


@main.command()
@_case_opt
@_config_opt
@_acc_opt
@_Z_opt
@click.option("--mmax", type=int, default=10, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@_zcap_opt
@_threads_opt
@_out_opt
def spectrum(case, config, accuracy, Z, mmax, fmt, zcap, threads, out):
    """Levels E = 8 pi^2 Z^2 (m^2 + n^2) with the periodic-skeleton cross-check."""
    try:
        cfg, extra = _resolve_case(case, config, None)
        if mmax < 1:
            raise ConfigError("mmax must be at least 1")
        appr = _approximation(cfg, _accuracy(extra, accuracy), Z, _zcap(extra, zcap), threads)
        rows = spectrum_rows(appr.Z, mmax)
        poc = sc.poc_spectrum(appr.Z, mmax)
        if fmt == "csv":
            lines = ["m,n,E_over_8pi2Z2,E_over_pi2,E"]
            lines += [f"{r['m']},{r['n']},{r['E_over_8pi2Z2']},{r['E_over_pi2']},{_fmt_float(r['E'])}" for r in rows]
            _emit("\n".join(lines), out)
        else:
            _emit(dumps({"case": cfg.name, "Z": appr.Z, "q": appr.q, "accuracy": appr.eps, "levels": rows,
                         "poc_identity": all(e.equal for e in poc), "poc_checked": len(poc)}), out)
    except (ConfigError, ValueError) as exc:
        _fail(exc)


@main.command()
@_case_opt
@_config_opt
@_L_opt
@_acc_opt
@_Z_opt
@click.option("--m", "m", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--grid", type=int, default=512, show_default=True, help="Grid points per axis.")
@click.option("--matrix", is_flag=True, help="Headerless matrix of Re Psi (NaN outside the quarter).")
@_zcap_opt
@_threads_opt
@_out_opt
def swf(case, config, L, accuracy, Z, m, n, grid, matrix, zcap, threads, out):
    """Wave function on a grid over the quarter polygon as CSV (x, y, Re Psi, Im Psi)."""
    try:
        cfg, extra = _resolve_case(case, config, L)
        if grid < 2:
            raise ConfigError("grid must be at least 2")
        appr = _approximation(cfg, _accuracy(extra, accuracy), Z, _zcap(extra, zcap), threads)
        model = sc.build_swf(_spec(cfg, appr, m, n))
        if model.degenerate:
            click.echo(dumps({"warning": "m = +-n: the wave function vanishes identically"}), err=True)
        V = model.epp.polygon.float_vertices()
        xs = np.linspace(V[:, 0].min(), V[:, 0].max(), grid)
        ys = np.linspace(V[:, 1].min(), V[:, 1].max(), grid)
        xx, yy = np.meshgrid(xs, ys)
        inside = sc.inside_quarter(model.epp, xx, yy)
        psi = np.full(xx.shape, np.nan, dtype=complex)
        psi[inside] = model(xx[inside], yy[inside])
        if matrix:
            text = "\n".join(" ".join(_fmt_float(v) for v in row) for row in psi.real)
        else:
            lines = ["x,y,re_psi,im_psi"]
            for x, y, v in zip(xx[inside], yy[inside], psi[inside]):
                lines.append(f"{_fmt_float(x)},{_fmt_float(y)},{_fmt_float(v.real)},{_fmt_float(v.imag)}")
            text = "\n".join(lines)
        _emit(text, out)
    except (ConfigError, ValueError, ArithmeticError) as exc:
        _fail(exc)


@main.command()
@_case_opt
@_config_opt
@_L_opt
@_acc_opt
@_Z_opt
@click.option("--m", "m", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--samples", type=int, default=4096, show_default=True, help="Points per boundary side.")
@click.option("--diag-samples", type=int, default=2048, show_default=True)
@click.option("--nodal-samples", type=int, default=32, show_default=True, help="Nodal estimates per side (0 skips).")
@_zcap_opt
@_threads_opt
@_out_opt
def residual(case, config, L, accuracy, Z, m, n, samples, diag_samples, nodal_samples, zcap, threads, out):
    """Boundary and diagonal residuals against their certificates, as JSON."""
    try:
        cfg, extra = _resolve_case(case, config, L)
        appr = _approximation(cfg, _accuracy(extra, accuracy), Z, _zcap(extra, zcap), threads)
        model = sc.build_swf(_spec(cfg, appr, m, n))
        _emit(dumps(residual_payload(model, appr.eps, samples, diag_samples, nodal_samples)), out)
    except (ConfigError, ValueError, ArithmeticError) as exc:
        _fail(exc)


@main.command()
@_case_opt
@_config_opt
@_L_opt
@_acc_opt
@_Z_opt
@click.option("--m", "m", type=int, default=1, show_default=True)
@click.option("--n", "n", type=int, default=2, show_default=True)
@click.option("--mmax", type=int, default=2, show_default=True)
@click.option("--samples", type=int, default=1024, show_default=True)
@_zcap_opt
@_threads_opt
@_out_opt
def report(case, config, L, accuracy, Z, m, n, mmax, samples, zcap, threads, out):
    """Full pipeline summary as one JSON document."""
    try:
        cfg, extra = _resolve_case(case, config, L)
        env = envelope_payload(cfg, 2000)
        un = unfold_payload(cfg, with_periods=False)
        appr = _approximation(cfg, _accuracy(extra, accuracy), Z, _zcap(extra, zcap), threads)
        model = sc.build_swf(_spec(cfg, appr, m, n))
        res = residual_payload(model, appr.eps, samples, max(64, samples // 4), 16)
        summary = {
            "case": cfg.name,
            "L": float(cfg.stadium.L),
            "envelope": {"n_vertices": env["n_vertices"], "interior_angles_over_pi": env["interior_angles_over_pi"],
                         "epsilon_pol": env["epsilon_pol"], "containment_violation": env["containment_violation"]},
            "unfolding": {k: un[k] for k in ("genus", "independent_period_count", "linking_period_count",
                                             "boundary_pair_count", "coefficient_lcm", "copies")},
            "approximation": dioph_row(cfg, appr),
            "spectrum": spectrum_rows(appr.Z, mmax),
            "residual": {"mode": [m, n],
                         "boundary": [{k: r[k] for k in ("side", "max_abs", "bound", "ok")} for r in res["boundary"]],
                         "diagonals_ok": all(d["ok"] for d in res.get("diagonals", [])),
                         "diagonal_max": max((d["max_abs"] for d in res.get("diagonals", [])), default=None),
                         "accuracy": res.get("accuracy")},
        }
        _emit(dumps(summary), out)
    except (ConfigError, ValueError, ArithmeticError, RuntimeError) as exc:
        _fail(exc)


if __name__ == "__main__":
    main()

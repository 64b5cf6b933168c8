"""Sweep execution with on-disk caching, manifests and resumable runs.

Output layout under the run directory::

    manifest.json          run-level record of every sweep point
    data/<table>_<i>.csv   one CSV per series and point
    json/<cmd>_<i>.json    per-point summary sidecar
    cache/<key>.json       payload cache keyed by parameters, command, grid, mode, version
    <cmd>_sweep.csv        one row per point for scalar results (teff, stability)
"""
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from datetime import datetime, timezone
import itertools
import os
import time

import numpy as np

from . import __version__
from .config import OPERATING_KEYS
from .dispersion import band_scan, band_gap_and_minima
from .dsf import dsf
from .errors import ConfigError, SpinOptomechError
from .io import (digest, params_hash, write_csv, write_json, read_json, fmt,
                 atomic_write_text)
from .spectra import Spin, dns_atomic, dns_mirror
from .stability import drift_matrix, stability_report
from .steady import SteadyState, steady_state
from .thermometry import effective_temperature

MAX_POINTS = 10 ** 7
CACHE_SCHEMA = 1


class SweepTooLarge(ConfigError):
    pass


@dataclass
class RunResult:
    exit_code: int
    manifest_path: str
    computed: int = 0
    cached: int = 0
    resumed: int = 0
    failed: int = 0
    records: list = field(default_factory=list)


def sweep_points(config):
    names = [n for n, _ in config.sweep]
    if not names:
        return [{}]
    return [dict(zip(names, combo)) for combo in
            itertools.product(*(values for _, values in config.sweep))]


def resolve_point(config, point):
    """(params, operating point, P) for one sweep point."""
    fields = set(config.params.field_names())
    params = config.params.replace(**{k: v for k, v in point.items() if k in fields})
    operating = dict(config.operating_point)
    operating.update({k: v for k, v in point.items() if k in OPERATING_KEYS})
    P = point.get("P", config.P)
    if operating:
        solved = None
        if not {"Delta", "G_m", "G_a"} <= set(operating):
            solved = steady_state(params)
        pick = {k: operating.get(k, getattr(solved, k, None)) for k in ("Delta", "G_m", "G_a")}
        ss = SteadyState.prescribed_point(params, n_s=operating.get("n_s"), **pick)
    else:
        ss = steady_state(params)
    return params, ss, P


def _grid(spec):
    start, stop, n = spec
    return np.linspace(start, stop, int(n))


def _table(header, *columns):
    return {"header": list(header), "columns": [np.asarray(c).tolist() for c in columns]}


def compute_point(subcommand, config, point):
    """Evaluate one sweep point; returns a JSON-ready payload."""
    params, ss, P = resolve_point(config, point)
    mode = config.mode
    allow = config.allow_unstable
    summary = {"operating_point": ss.to_dict()}
    tables = {}
    if subcommand == "dispersion":
        k0, k1, n = config.k_grid
        bs = band_scan(k0, k1, int(n), params, selfconsistent=config.selfconsistent)
        report = band_gap_and_minima(bs)
        tables["dispersion"] = _table(("k_x", "E_minus", "E_plus"), bs.k_grid,
                                      bs.e_minus.real, bs.e_plus.real)
        summary.update(
            minima=[[m.k, m.energy] for m in report.minima],
            gap_at_zero=report.gap_at_zero, global_gap=report.global_gap,
            double_well=report.double_well, selfconsistent=config.selfconsistent,
            max_abs_imag=float(max(np.abs(bs.e_minus.imag).max(), np.abs(bs.e_plus.imag).max())),
        )
    elif subcommand == "stability":
        summary.update(stability_report(drift_matrix(ss, params), params))
    elif subcommand == "dns":
        w = _grid(config.omega_grid)
        for name, values in (
            ("dns_up", dns_atomic(w, None, Spin.UP, ss, params, mode, allow)),
            ("dns_down", dns_atomic(w, None, Spin.DOWN, ss, params, mode, allow)),
            ("dns_mirror", dns_mirror(w, None, ss, params, mode, allow)),
        ):
            tables[name] = _table(("omega", "value", "warning_flag"), w, values, values < 0)
        summary.update(mode=mode.value, path="ClosedForm")
    elif subcommand == "teff":
        summary.update(effective_temperature(ss, params, None, mode, allow_unstable=allow).to_dict())
    elif subcommand == "dsf":
        w = _grid(config.omega_grid)
        curve = dsf(config.k_label, P, w, ss, params, mode, config.P_ref, allow)
        tables["dsf"] = _table(("omega", "inelastic", "warning_flag"), w, curve.inelastic,
                               curve.warning_flags)
        summary.update(curve.to_dict())
    else:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    return {"tables": tables, "summary": summary}


def _safe_compute(subcommand, config, point):
    try:
        return "ok", compute_point(subcommand, config, point), None
    except SpinOptomechError as exc:
        return "error", None, {**exc.to_dict(), "exit_code": exc.exit_code}
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        return "error", None, {"error": type(exc).__name__, "message": str(exc), "exit_code": 3}


def point_key(subcommand, config, point, phash):
    grid = config.k_grid if subcommand == "dispersion" else config.omega_grid
    return digest({
        "params_hash": phash, "subcommand": subcommand, "grid": list(grid),
        "mode": config.mode.value, "version": __version__, "schema": CACHE_SCHEMA,
        "P": point.get("P", config.P), "P_ref": config.P_ref,
        "selfconsistent": config.selfconsistent, "allow_unstable": config.allow_unstable,
        "k_label": config.k_label,
    })


def _now():
    return datetime.now(timezone.utc).isoformat()


class _Writer:
    """Single sink for everything written to the run directory."""

    def __init__(self, out_dir, subcommand, config):
        self.out = out_dir
        self.sub = subcommand
        self.config = config
        os.makedirs(out_dir, exist_ok=True)

    def path(self, *parts):
        return os.path.join(self.out, *parts)

    def cache_path(self, key):
        return self.path("cache", f"{key}.json")

    def emit(self, index, point, phash, payload):
        comments = (f"params_hash={phash}", f"mode={self.config.mode.value}",
                    f"point={point}")
        files = []
        for name, table in payload["tables"].items():
            rel = os.path.join("data", f"{name}_{index:05d}.csv")
            write_csv(self.path(rel), table["header"], table["columns"], comments)
            files.append(rel)
        rel = os.path.join("json", f"{self.sub}_{index:05d}.json")
        write_json(self.path(rel), {"params_hash": phash, "mode": self.config.mode.value,
                                    "point": point, **payload["summary"]})
        files.append(rel)
        return files


def _scalar_columns(summary):
    # sorted so fresh and cache-loaded payloads give the same column order
    return sorted(k for k, v in summary.items()
                  if isinstance(v, (int, float)) and not isinstance(v, bool))


def _write_sweep_table(writer, records, payloads, config):
    names = [n for n, _ in config.sweep]
    rows = [(r, payloads[r["index"]]) for r in records if r["status"] == "ok"]
    if not rows:
        return None
    scalars = [s for s in _scalar_columns(rows[0][1]["summary"]) if s not in names]
    if not scalars:
        return None
    header = ["index", "params_hash"] + names + scalars
    lines = [",".join(header)]
    for rec, payload in rows:
        vals = [str(rec["index"]), rec["params_hash"]]
        vals += [fmt(rec["point"][n]) for n in names]
        vals += [fmt(payload["summary"][s]) for s in scalars]
        lines.append(",".join(vals))
    rel = f"{writer.sub}_sweep.csv"
    atomic_write_text(writer.path(rel), "# mode=" + config.mode.value + "\n" + "\n".join(lines) + "\n")
    return rel


def run(config, subcommand, out_dir, use_cache=True, resume=False, force=False,
        workers=None, max_points=None):
    """Execute ``subcommand`` over every sweep point of ``config``.

    ``max_points`` stops after that many freshly computed points, leaving an
    incomplete manifest (used to exercise ``resume``).
    """
    sub = config.target if subcommand == "sweep" else subcommand
    size = config.sweep_size
    if size > MAX_POINTS and not force:
        raise SweepTooLarge(f"sweep has {size} points (limit {MAX_POINTS}); use --force")
    writer = _Writer(out_dir, sub, config)
    manifest_path = writer.path("manifest.json")
    t0 = time.perf_counter()
    started = _now()

    points = sweep_points(config)
    records = []
    for i, pt in enumerate(points):
        fields = set(config.params.field_names())
        p = config.params.replace(**{k: v for k, v in pt.items() if k in fields})
        op = dict(config.operating_point)
        op.update({k: v for k, v in pt.items() if k in OPERATING_KEYS})
        phash = params_hash(p, op)
        records.append({"index": i, "point": pt, "params_hash": phash,
                        "key": point_key(sub, config, pt, phash), "status": "pending"})

    previous = {}
    if resume and os.path.exists(manifest_path):
        old = read_json(manifest_path)
        previous = {r["key"]: r for r in old.get("records", []) if r.get("status") == "ok"}

    payloads = {}
    todo = []
    result = RunResult(exit_code=0, manifest_path=manifest_path)
    for rec in records:
        prev = previous.get(rec["key"])
        if prev and all(os.path.exists(writer.path(f)) for f in prev.get("files", [])) \
                and os.path.exists(writer.cache_path(rec["key"])):
            payloads[rec["index"]] = read_json(writer.cache_path(rec["key"]))
            rec.update(status="ok", files=prev["files"], source="resumed",
                       finished=prev.get("finished"))
            result.resumed += 1
            continue
        cpath = writer.cache_path(rec["key"])
        if use_cache and os.path.exists(cpath):
            payload = read_json(cpath)
            payloads[rec["index"]] = payload
            rec.update(status="ok", source="cache", finished=_now(),
                       files=writer.emit(rec["index"], rec["point"], rec["params_hash"], payload))
            result.cached += 1
            continue
        todo.append(rec)

    def manifest(complete):
        incomplete = [r["index"] for r in records if r["status"] != "ok"]
        write_json(manifest_path, {
            "version": __version__, "subcommand": sub, "mode": config.mode.value,
            "seed": config.seed, "config": config.to_dict(),
            "config_hash": digest(config.to_dict()),
            "sweep": [[n, list(v)] for n, v in config.sweep], "size": size,
            "started": started, "finished": _now() if complete else None,
            "wall_clock": time.perf_counter() - t0,
            "complete": complete and not incomplete,
            "incomplete": incomplete, "records": records,
        })

    def accept(rec, status, payload, error):
        rec["finished"] = _now()
        if status == "ok":
            write_json(writer.cache_path(rec["key"]), payload)
            payloads[rec["index"]] = payload
            rec.update(status="ok", source="computed",
                       files=writer.emit(rec["index"], rec["point"], rec["params_hash"], payload))
            result.computed += 1
        else:
            rec.update(status="error", error=error)
            result.failed += 1
            result.exit_code = max(result.exit_code, error.get("exit_code", 3))
        manifest(False)

    if max_points is not None:
        todo = todo[:max_points]
        stopped_early = len(todo) < sum(1 for r in records if r["status"] == "pending")
    else:
        stopped_early = False

    n_workers = workers or os.cpu_count() or 1
    if todo and (n_workers == 1 or len(todo) == 1):
        for rec in todo:
            accept(rec, *_safe_compute(sub, config, rec["point"]))
    elif todo:
        with ProcessPoolExecutor(max_workers=min(n_workers, len(todo))) as pool:
            futures = {pool.submit(_safe_compute, sub, config, rec["point"]): rec for rec in todo}
            for fut in as_completed(futures):
                accept(futures[fut], *fut.result())

    table = _write_sweep_table(writer, records, payloads, config)
    manifest(not stopped_early)
    if table:
        m = read_json(manifest_path)
        m["sweep_table"] = table
        write_json(manifest_path, m)
    result.records = records
    return result

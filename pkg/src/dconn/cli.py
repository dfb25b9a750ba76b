"""Command-line front end: decomposition, order estimation, curvature, holonomy.

Every command reads a JSON config (--config) and emits a JSON report on
stdout or to --out.  Reports are deterministic: keys sorted, two-space
indent, a trailing newline, no timestamps or machine fields.  Exit codes:
0 success, 2 domain or validation failure, 3 unreadable input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import levi_civita as lc
from . import lie_group as lg
from . import meshes
from .bundle import BundlePoint, PairElement, act
from .connection import (
    DiscreteConnection,
    eval_form,
    horizontal_component,
    vertical_component,
)
from .errors import DconnError, DegenerateFitError
from .limits import estimate_order, unit_directions
from .presets import default_pair, resolve_connection

_EXIT_OK = 0
_EXIT_DOMAIN = 2
_EXIT_PARSE = 3


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    return x


def _dump_report(report: dict, out_path: str | None) -> None:
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _check_threads() -> None:
    raw = os.environ.get("DCONN_THREADS")
    if raw is None:
        return
    try:
        cap = int(raw)
    except ValueError as exc:
        raise DconnError(f"DCONN_THREADS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise DconnError(f"DCONN_THREADS must be positive, got {cap}")
    # All work currently runs on one thread, which satisfies any positive cap.


def _load_config(path: str) -> dict:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise DconnError("config root must be a JSON object")
    return data


def _build_connection(cfg: dict, key: str = "connection") -> DiscreteConnection:
    family = cfg.get(key)
    if not isinstance(family, str):
        raise DconnError(f"config field {key!r} must name a connection family")
    return resolve_connection(
        family, cfg.get("group", "SO3"), int(cfg.get("shape_dim", 2))
    )


def _parse_point(conn: DiscreteConnection, data: dict) -> BundlePoint:
    try:
        coords = np.asarray(data["shape"], dtype=float)
        fiber = np.asarray(data["fiber"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DconnError(f"bad bundle point in config: {exc}") from exc
    return conn.bundle.point(coords, lg.element(conn.bundle.group, fiber))


def _parse_pair(conn: DiscreteConnection, cfg: dict) -> PairElement:
    data = cfg.get("pair")
    if data is None:
        return default_pair(conn.bundle)
    return PairElement(
        _parse_point(conn, data["first"]), _parse_point(conn, data["second"])
    )


def _point_report(q: BundlePoint) -> dict:
    return {"shape": q.shape.coords, "fiber": q.fiber.matrix}


def cmd_decompose(cfg: dict) -> dict:
    conn = _build_connection(cfg)
    pair = _parse_pair(conn, cfg)
    w = eval_form(conn, pair)
    hor = horizontal_component(conn, pair)
    ver = vertical_component(conn, pair)
    recon = act(w, hor.second)
    residual = max(
        float(np.max(np.abs(recon.fiber.matrix - pair.second.fiber.matrix))),
        float(np.max(np.abs(recon.shape.coords - pair.second.shape.coords), initial=0.0)),
    )
    return {
        "command": "decompose",
        "connection": cfg["connection"],
        "connection_value": w.matrix,
        "horizontal": {"first": _point_report(hor.first), "second": _point_report(hor.second)},
        "vertical": {"first": _point_report(ver.first), "second": _point_report(ver.second)},
        "reconstruction_residual": residual,
    }


def cmd_order(cfg: dict) -> dict:
    candidate = _build_connection(cfg, "candidate")
    reference = _build_connection(cfg, "reference")
    sweep = cfg.get("h_sweep", {})
    start = float(sweep.get("start", 1.0e-1))
    stop = float(sweep.get("stop", 1.0e-3))
    count = int(sweep.get("count", 7))
    h_list = [float(h) for h in np.geomspace(start, stop, count)]
    if "base_point" in cfg:
        q = _parse_point(reference, cfg["base_point"])
    else:
        q = default_pair(reference.bundle).first
    directions = unit_directions(
        reference.bundle, q, int(cfg.get("directions", 32)), int(cfg.get("seed", 7))
    )
    report = {
        "command": "order",
        "candidate": cfg["candidate"],
        "reference": cfg["reference"],
        "step_sizes": h_list,
    }
    try:
        est = estimate_order(candidate, reference, q, directions, h_list)
    except DegenerateFitError as exc:
        report.update({"order": None, "exact_match": False, "warning": str(exc)})
        return report
    report.update(
        {
            "order": None if est.exact_match else est.order,
            "slope": None if est.exact_match else est.slope,
            "exact_match": est.exact_match,
            "max_errors": list(est.max_errors),
            "per_direction_errors": [list(row) for row in est.errors],
        }
    )
    return report


def _load_mesh(cfg: dict) -> lc.MetricComplex:
    path = cfg.get("mesh")
    if not isinstance(path, str):
        raise DconnError("config field 'mesh' must be a file path")
    return meshes.read_mesh(path)


def cmd_curvature(cfg: dict) -> dict:
    K = _load_mesh(cfg)
    A = lc.connection_form(K)
    report = lc.quality_report(K, A)
    total = lc.total_defect(K)
    chi = K.euler_characteristic()
    closed = K.is_closed()
    return {
        "command": "curvature",
        "mesh": cfg["mesh"],
        "per_vertex": [[v, norm] for v, norm in report.items()],
        "total_curvature": total,
        "euler_characteristic": chi,
        "two_pi_chi": 2.0 * math.pi * chi,
        "gauss_bonnet_residual": (total - 2.0 * math.pi * chi) if closed else None,
        "is_closed": closed,
    }


def _angle_of(m: np.ndarray) -> float:
    return math.atan2(m[1, 0], m[0, 0])


def _mod_2pi_distance(a: float, b: float) -> float:
    return abs(float(np.angle(np.exp(1j * (a - b)))))


def cmd_holonomy(cfg: dict) -> dict:
    K = _load_mesh(cfg)
    A = lc.connection_form(K)
    enclosed_curvature = None
    if "loop" in cfg:
        loop = [int(t) for t in cfg["loop"]]
        loop_source = "explicit"
    elif "around_vertex" in cfg:
        v = int(cfg["around_vertex"])
        walk = lc._star_walk(K, v)
        loop = walk + [walk[0]]
        enclosed_curvature = lc.angle_defect(K, v)
        loop_source = "around_vertex"
    elif "latitude" in cfg:
        colat = math.radians(float(cfg["latitude"]["colatitude_deg"]))
        loop, enclosed = meshes.latitude_loop(K, colat)
        enclosed_curvature = float(
            sum(lc.angle_defect(K, v) for v in enclosed)
        )
        loop_source = "latitude"
    else:
        raise DconnError("holonomy config needs 'loop', 'around_vertex', or 'latitude'")
    h = lc.holonomy(K, A, loop)
    angle = _angle_of(h.matrix)
    report = {
        "command": "holonomy",
        "mesh": cfg["mesh"],
        "loop_source": loop_source,
        "loop_length": len(loop) - 1,
        "holonomy_matrix": h.matrix,
        "angle": angle,
        "enclosed_curvature": enclosed_curvature,
    }
    if enclosed_curvature is not None:
        report["difference_mod_2pi"] = _mod_2pi_distance(angle, enclosed_curvature)
    return report


_DISPATCH = {
    "decompose": cmd_decompose,
    "order": cmd_order,
    "curvature": cmd_curvature,
    "holonomy": cmd_holonomy,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dconn",
        description="Discrete connection reports: decomposition, order, curvature, holonomy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _DISPATCH.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", help="write the report here instead of stdout")
    args = parser.parse_args(argv)
    try:
        _check_threads()
        cfg = _load_config(args.config)
        report = _DISPATCH[args.command](cfg)
        _dump_report(report, args.out)
    except json.JSONDecodeError as exc:
        print(f"dconn: cannot parse input: {exc}", file=sys.stderr)
        return _EXIT_PARSE
    except OSError as exc:
        print(f"dconn: cannot read or write: {exc}", file=sys.stderr)
        return _EXIT_PARSE
    except DconnError as exc:
        print(f"dconn: {exc}", file=sys.stderr)
        return _EXIT_DOMAIN
    except (KeyError, TypeError, ValueError) as exc:
        print(f"dconn: invalid config: {exc!r}", file=sys.stderr)
        return _EXIT_DOMAIN
    return _EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

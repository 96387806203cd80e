"""File formats: constraint configs, witness certificates, reports and series.

Floats go through ``json`` / ``repr``, which emit the shortest string that
parses back to the same double, so every file round-trips bit-for-bit.
Writes land in a temporary file in the target directory and are renamed on
success; a failed run leaves no partial output.
"""
from dataclasses import asdict, dataclass
import json
import math
import os
from pathlib import Path
import tempfile

import numpy as np

from . import geometry
from .constraints import GridSpec
from .pipeline import KappaSpectrum
from .witness import AngleWeight, GraphWeight, WitnessCertificate

DATA_DIR = Path(__file__).resolve().parent / "data"
REFERENCE_CONFIG = DATA_DIR / "reference_constraints.json"
REFERENCE_WITNESS = DATA_DIR / "reference_witness.json"


class ConfigError(ValueError):
    """Unreadable or invalid input file."""


@dataclass
class ConstraintConfig:
    grid: GridSpec
    triangles: list
    angles: list
    edge_policy: str = "complete"
    bracket: tuple = (0.20, 0.35)
    tolerance: float = 1e-6


def atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def dump_json(obj):
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _number(obj, key, where, positive=False):
    if key not in obj:
        raise ConfigError(f"{where}: missing {key!r}")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}: {key!r} must be a finite number, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(f"{where}: {key!r} must be positive")
    return float(v)


def _triangle(obj, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object with x1, x2, y")
    return geometry.TriangleSpec(*(_number(obj, k, where) for k in ("x1", "x2", "y")))


def _policy(value, where):
    if value not in geometry.EDGE_POLICIES:
        raise ConfigError(f"{where}: edge policy must be one of {geometry.EDGE_POLICIES}")
    return value


def parse_config(data, where="config"):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: top level must be an object")
    g = data.get("grid", {})
    if not isinstance(g, dict):
        raise ConfigError(f"{where}: 'grid' must be an object")
    step = _number(g, "step", f"{where}.grid", positive=True) if "step" in g else 0.05
    count = g.get("count", 12001)
    if isinstance(count, bool) or not isinstance(count, int) or count < 2:
        raise ConfigError(f"{where}.grid: 'count' must be an integer >= 2")
    tris = data.get("c1r_triangles", [])
    angles = data.get("ct_angles", [])
    if not isinstance(tris, list) or not isinstance(angles, list):
        raise ConfigError(f"{where}: 'c1r_triangles' and 'ct_angles' must be lists")
    triangles = [_triangle(t, f"{where}.c1r_triangles[{i}]") for i, t in enumerate(tris)]
    thetas = []
    for i, th in enumerate(angles):
        if isinstance(th, bool) or not isinstance(th, (int, float)) or not math.isfinite(th):
            raise ConfigError(f"{where}.ct_angles[{i}]: not a finite number")
        thetas.append(float(th))
    policy = _policy(data.get("triangle_edge_policy", "complete"), where)
    bracket = data.get("bracket", [0.20, 0.35])
    if (not isinstance(bracket, list) or len(bracket) != 2
            or not all(isinstance(b, (int, float)) for b in bracket)
            or not 0 < bracket[0] < bracket[1]):
        raise ConfigError(f"{where}: 'bracket' must be [lo, hi] with 0 < lo < hi")
    tol = _number(data, "tolerance", where, positive=True) if "tolerance" in data else 1e-6
    return ConstraintConfig(GridSpec(step, count), triangles, thetas, policy,
                            (float(bracket[0]), float(bracket[1])), tol)


def load_config(path):
    return parse_config(read_json(path), str(path))


# witness certificates

def witness_to_dict(cert):
    graphs = []
    for gw in cert.graphs:
        if gw.triangle is None:
            raise ValueError("only triangle graphs can be serialized")
        tr = gw.triangle
        graphs.append({"triangle": {"x1": tr.x1, "x2": tr.x2, "y": tr.y},
                       "edge_policy": gw.edge_policy, "alpha": gw.alpha, "weight": gw.weight})
    out = {"v0": cert.v0, "v1": cert.v1, "graphs": graphs,
           "angles": [{"theta": a.theta, "weight": a.weight} for a in cert.angles]}
    if cert.meta:
        out["meta"] = cert.meta
    return out


def witness_from_dict(data, where="witness"):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: top level must be an object")
    v0, v1 = _number(data, "v0", where), _number(data, "v1", where)
    default_policy = data.get("edge_policy", "complete")
    graphs = []
    for i, g in enumerate(data.get("graphs", [])):
        loc = f"{where}.graphs[{i}]"
        if not isinstance(g, dict):
            raise ConfigError(f"{loc}: expected an object")
        spec = _triangle(g.get("triangle", g), loc)
        policy = _policy(g.get("edge_policy", default_policy), loc)
        w = _number(g, "weight", loc)
        if w < 0.0:
            raise ConfigError(f"{loc}: negative weight {w!r}")
        alpha = g.get("alpha")
        if isinstance(alpha, bool) or not isinstance(alpha, int) or alpha < 0:
            raise ConfigError(f"{loc}: 'alpha' must be a nonnegative integer")
        try:
            graph = geometry.build_triangle(spec, policy)
        except ValueError as exc:
            raise ConfigError(f"{loc}: {exc}") from exc
        graphs.append(GraphWeight(graph, alpha, w, spec, policy))
    angles = []
    for i, a in enumerate(data.get("angles", [])):
        loc = f"{where}.angles[{i}]"
        if not isinstance(a, dict):
            raise ConfigError(f"{loc}: expected an object")
        w = _number(a, "weight", loc)
        if w < 0.0:
            raise ConfigError(f"{loc}: negative weight {w!r}")
        angles.append(AngleWeight(_number(a, "theta", loc), w))
    meta = data.get("meta", {})
    try:
        return WitnessCertificate(v0, v1, tuple(graphs), tuple(angles), meta)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_witness(path):
    return witness_from_dict(read_json(path), str(path))


def save_witness(cert, path):
    atomic_write(path, dump_json(witness_to_dict(cert)))


def report_to_dict(report):
    d = asdict(report)
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in d.items()}


def save_report(report, path):
    atomic_write(path, dump_json(report_to_dict(report)))


# CSV series

def format_series(header, xs, ys):
    lines = [header]
    lines += [f"{float(x)!r},{float(y)!r}" for x, y in zip(xs, ys)]
    return "\n".join(lines) + "\n"


def read_series(path, header):
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    if not lines or lines[0].strip() != header:
        raise ConfigError(f"{path}: expected header {header!r}")
    xs, ys = [], []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        try:
            if len(parts) != 2:
                raise ValueError
            xs.append(float(parts[0]))
            ys.append(float(parts[1]))
        except ValueError:
            raise ConfigError(f"{path}: line {n}: expected two numbers") from None
    return np.array(xs), np.array(ys)


def save_spectrum(spectrum, path):
    atomic_write(path, format_series("t,kappa", spectrum.t, spectrum.values))


def load_spectrum(path):
    t, k = read_series(path, "t,kappa")
    try:
        spec = KappaSpectrum(t, k)
        spec.check_normalized()
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if t.size == 0 or np.any(t < 0.0):
        raise ConfigError(f"{path}: frequencies must be nonnegative")
    return spec


def polyline_svg(xs, ys, width=600, height=300, pad=30):
    """Self-contained SVG line plot with a zero axis."""
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = min(0.0, float(ys.min())), max(1.0, float(ys.max()))
    sx = (width - 2 * pad) / ((x1 - x0) or 1.0)
    sy = (height - 2 * pad) / ((y1 - y0) or 1.0)

    def px(x, y):
        return f"{pad + (x - x0) * sx:.2f},{height - pad - (y - y0) * sy:.2f}"

    pts = " ".join(px(x, y) for x, y in zip(xs, ys))
    zy = height - pad - (0.0 - y0) * sy
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}">\n'
        f'  <rect width="{width}" height="{height}" fill="white"/>\n'
        f'  <line x1="{pad}" y1="{zy:.2f}" x2="{width - pad}" y2="{zy:.2f}" '
        f'stroke="#999" stroke-width="1"/>\n'
        f'  <line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="#999" stroke-width="1"/>\n'
        f'  <text x="{pad}" y="{height - 8}" font-size="11">r = {x0:g}</text>\n'
        f'  <text x="{width - pad}" y="{height - 8}" font-size="11" text-anchor="end">r = {x1:g}</text>\n'
        f'  <polyline fill="none" stroke="#1f4e9c" stroke-width="1.5" points="{pts}"/>\n'
        f'</svg>\n'
    )

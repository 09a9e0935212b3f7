"""Flat text configuration: one `section.key = value` per line, `#` comments.

Numeric fields accept the literal `auto` where a physics default applies
(eta -> k1, kappa -> (k1+k2)/2 + i*k1, p -> 3 or 4 for the single-equation
formulation).  Sweeps are semicolon-separated `k1,k2,unknowns` triples.
"""

from dataclasses import dataclass, field

from .formulations import FORMULATIONS


class ConfigError(ValueError):
    pass


def parse_config_text(text, path="<config>"):
    """Parse the flat key = value format into a dict, with line diagnostics."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        key = key.strip().lower()
        val = val.strip()
        if not key or not val:
            raise ConfigError(f"{path}:{lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = val
    return out


def _get_float(raw, key, default=None):
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return float(raw[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: {exc}") from None


def _get_int(raw, key, default=None):
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return int(raw[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: {exc}") from None


def _get_auto_float(raw, key):
    if key not in raw or raw[key].lower() == "auto":
        return None
    return _get_float(raw, key)


@dataclass
class RunConfig:
    geometry_kind: str = "square"
    geometry_params: dict = field(default_factory=dict)
    k1: float = 1.0
    k2: float = 4.0
    rho_mode: str = "one"
    eta: float = None              # None -> k1
    kappa_re: float = None         # None -> (k1+k2)/2
    kappa_im: float = None         # None -> k1
    unknowns: tuple = (2048,)
    p: int = None                  # None -> 3 (4 for scfie)
    formulations: tuple = ("cfiesk",)
    gmres_tol: float = 1e-12
    gmres_max_iter: int = 1000
    num_dirs: int = 1024
    csv_path: str = "run.csv"
    farfield_path: str = "farfield.csv"
    threads: int = 1
    sweep: tuple = ()              # ((k1, k2, unknowns), ...) for bench

    def validate(self):
        if self.geometry_kind not in ("square", "ushape", "lq_ball", "polygon"):
            raise ConfigError(f"unknown geometry kind {self.geometry_kind!r}")
        if self.rho_mode not in ("one", "k_ratio"):
            raise ConfigError(f"unknown rho mode {self.rho_mode!r}")
        for f in self.formulations:
            if f not in FORMULATIONS:
                raise ConfigError(f"unknown formulation {f!r}")
        if not (0.0 < self.gmres_tol < 1.0):
            raise ConfigError("gmres.tol must lie in (0, 1)")
        for u in self.unknowns:
            self.check_unknowns(u)
        for k1, k2, u in self.sweep:
            if k1 <= 0 or k2 <= 0:
                raise ConfigError("sweep wavenumbers must be positive")
            self.check_unknowns(u)
        return self

    def check_unknowns(self, u):
        need_two_trace = any(f != "scfie" for f in self.formulations)
        if need_two_trace and u % 4 != 0:
            raise ConfigError(f"unknowns {u} not divisible by 4 (two-trace system)")
        if u % 2 != 0:
            raise ConfigError(f"unknowns {u} not divisible by 2")


def _parse_unknowns(val):
    try:
        return tuple(int(p) for p in val.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"discretization.unknowns: {exc}") from None


def _parse_sweep(val):
    rows = []
    for chunk in val.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.replace(",", " ").split()
        if len(parts) != 3:
            raise ConfigError(f"sweep row {chunk!r}: expected 'k1, k2, unknowns'")
        try:
            rows.append((float(parts[0]), float(parts[1]), int(parts[2])))
        except ValueError as exc:
            raise ConfigError(f"sweep row {chunk!r}: {exc}") from None
    return tuple(rows)


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        raw = parse_config_text(fh.read(), path=str(path))
    return config_from_dict(raw)


def config_from_dict(raw):
    cfg = RunConfig()
    cfg.geometry_kind = raw.get("geometry.kind", cfg.geometry_kind).lower()
    gp = {}
    if "geometry.side" in raw:
        gp["side"] = _get_float(raw, "geometry.side")
    if "geometry.indent" in raw:
        gp["indent"] = _get_float(raw, "geometry.indent")
    if "geometry.q" in raw:
        gp["q"] = _get_int(raw, "geometry.q")
    if "geometry.radius" in raw:
        gp["radius"] = _get_float(raw, "geometry.radius")
    if "geometry.vertices" in raw:
        verts = []
        for chunk in raw["geometry.vertices"].split(";"):
            xy = chunk.replace(",", " ").split()
            if len(xy) != 2:
                raise ConfigError(f"geometry.vertices: bad vertex {chunk!r}")
            verts.append((float(xy[0]), float(xy[1])))
        gp["vertices"] = verts
    cfg.geometry_params = gp
    cfg.k1 = _get_float(raw, "physics.k1", cfg.k1)
    cfg.k2 = _get_float(raw, "physics.k2", cfg.k2)
    cfg.rho_mode = raw.get("physics.rho_mode", cfg.rho_mode).lower()
    cfg.eta = _get_auto_float(raw, "physics.eta")
    cfg.kappa_re = _get_auto_float(raw, "physics.kappa_re")
    cfg.kappa_im = _get_auto_float(raw, "physics.kappa_im")
    if "discretization.unknowns" in raw:
        cfg.unknowns = _parse_unknowns(raw["discretization.unknowns"])
    if "discretization.p" in raw and raw["discretization.p"].lower() != "auto":
        cfg.p = _get_int(raw, "discretization.p")
    if "formulation" in raw:
        cfg.formulations = (raw["formulation"].lower(),)
    if "run.formulations" in raw:
        cfg.formulations = tuple(raw["run.formulations"].lower().split())
    cfg.gmres_tol = _get_float(raw, "gmres.tol", cfg.gmres_tol)
    cfg.gmres_max_iter = _get_int(raw, "gmres.max_iter", cfg.gmres_max_iter)
    cfg.num_dirs = _get_int(raw, "farfield.num_dirs", cfg.num_dirs)
    cfg.csv_path = raw.get("output.csv_path", cfg.csv_path)
    cfg.farfield_path = raw.get("output.farfield_path", cfg.farfield_path)
    cfg.threads = _get_int(raw, "threads", cfg.threads)
    if "bench.sweep" in raw:
        cfg.sweep = _parse_sweep(raw["bench.sweep"])
    return cfg.validate()

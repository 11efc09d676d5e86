"""Command-line entry point.

Commands: graph, spectrum, wkb, compare, pseudo, growth, validate.
Configuration comes from a flat key=value file plus flag overrides; every
output file carries a comment header with the package version and a hash
of the effective configuration, and is written atomically (temp + rename).

Exit codes: 0 success, 2 configuration error, 3 numerical failure. Any
failure also writes an error.json with module, operation and parameters.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

from . import __version__
from .disc import build_model, build_os, eigensolve, filter_spurious, hausdorff
from .errors import ConfigError, LimitspecError
from .graph import assemble_graph
from .nonnormal import (growth_fit, omega_region, pseudospectra,
                        resolution_for, riesz_growth_fit)
from .profile import Profile, default_strip, parse_profile, validate_am
from .wkb import enumerate_wkb, match_spectra


@dataclass
class RunConfig:
    profile: str = "builtin:couette"
    alpha: float = 1.0
    epsilon: float | None = None
    reynolds: float | None = None
    n: int | None = None
    delta: float = 0.05
    im_cutoff: float | None = None
    trace_tol: float = 1e-9
    newton_tol: float = 1e-11
    filter_tol: float = 1e-6
    out: str = "."
    # command-specific options
    which: str = "model"
    with_os: bool = False
    target: str = "resolvent"
    norm: str = "L2"
    lam: complex | None = None
    rect: tuple[float, float, float, float] | None = None
    nx: int = 40
    ny: int = 40
    eps_list: list[float] = field(default_factory=list)

    def resolved(self) -> "RunConfig":
        """Validate invariants and derive epsilon/reynolds from each other."""
        if (self.epsilon is None) == (self.reynolds is None):
            raise ConfigError("exactly one of epsilon and reynolds required")
        if self.epsilon is None:
            if self.reynolds <= 0 or self.alpha <= 0:
                raise ConfigError("alpha and reynolds must be positive")
            self.epsilon = 1.0 / math.sqrt(self.alpha * self.reynolds)
        else:
            if self.epsilon <= 0 or self.alpha <= 0:
                raise ConfigError("alpha and epsilon must be positive")
            self.reynolds = 1.0 / (self.alpha * self.epsilon ** 2)
        for name in ("trace_tol", "newton_tol", "filter_tol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        p = self.profile_obj()
        if p.b > p.a and (not self.delta > 0
                          or self.delta >= (p.b - p.a) / 4):
            raise ConfigError(
                f"delta must lie in (0, (b-a)/4) = (0, {(p.b - p.a) / 4})")
        if self.n is None:
            self.n = resolution_for(self.epsilon)
        if self.n < 8:
            raise ConfigError("n must be at least 8")
        if self.norm not in ("L2", "Sobolev"):
            raise ConfigError("norm must be L2 or Sobolev")
        if self.which not in ("model", "os", "hermitian"):
            raise ConfigError("which must be model, os or hermitian")
        return self

    def profile_obj(self) -> Profile:
        try:
            return parse_profile(self.profile)
        except (ValueError, LimitspecError) as exc:
            raise ConfigError(f"bad profile {self.profile!r}: {exc}") from exc

    def as_dict(self) -> dict:
        d = {}
        for k, v in self.__dict__.items():
            if isinstance(v, complex):
                v = [v.real, v.imag]
            elif isinstance(v, tuple):
                v = list(v)
            d[k] = v
        return d

    def digest(self) -> str:
        # the hash identifies the computation, not where it was written
        payload = {k: v for k, v in self.as_dict().items() if k != "out"}
        blob = json.dumps(payload, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# config file + flags

_FLOAT_KEYS = {"alpha", "epsilon", "reynolds", "delta", "im_cutoff",
               "trace_tol", "newton_tol", "filter_tol"}
_INT_KEYS = {"n", "nx", "ny"}
_BOOL_KEYS = {"with_os"}


def _parse_complex(text: str) -> complex:
    try:
        re_s, im_s = text.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError as exc:
        raise ConfigError(f"expected 're,im', got {text!r}") from exc


def _set_key(cfg: RunConfig, key: str, value: str) -> None:
    key = key.replace("-", "_")
    if not hasattr(cfg, key):
        raise ConfigError(f"unknown config key {key!r}")
    if key in _FLOAT_KEYS:
        cfg.__dict__[key] = float(value)
    elif key in _INT_KEYS:
        cfg.__dict__[key] = int(value)
    elif key in _BOOL_KEYS:
        cfg.__dict__[key] = value.lower() in ("1", "true", "yes")
    elif key == "lam":
        cfg.lam = _parse_complex(value)
    elif key == "rect":
        parts = [float(v) for v in value.split(",")]
        if len(parts) != 4:
            raise ConfigError("rect needs re0,re1,im0,im1")
        cfg.rect = tuple(parts)
    elif key == "eps_list":
        cfg.eps_list = [float(v) for v in value.split(",")]
    else:
        cfg.__dict__[key] = value


def load_config(path: str) -> dict[str, str]:
    """Flat key = value lines; '#' starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, value = line.split("=", 1)
                out[key.strip()] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return out


def build_runconfig(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        for key, value in load_config(args.config).items():
            _set_key(cfg, key, value)
    for key in ("profile", "alpha", "epsilon", "reynolds", "n", "delta",
                "im_cutoff", "out", "which", "with_os", "target", "norm",
                "nx", "ny"):
        value = getattr(args, key, None)
        if value is not None and value is not False:
            cfg.__dict__[key] = value
    if getattr(args, "lam", None) is not None:
        cfg.lam = _parse_complex(args.lam)
    if getattr(args, "rect", None) is not None:
        _set_key(cfg, "rect", args.rect)
    if getattr(args, "eps_list", None) is not None:
        _set_key(cfg, "eps_list", args.eps_list)
    return cfg.resolved()


# ---------------------------------------------------------------------------
# output plumbing

def _header(cfg: RunConfig, command: str) -> str:
    return (f"# limitspec {__version__}\n"
            f"# command {command}\n"
            f"# config {cfg.digest()}\n")


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_csv(cfg: RunConfig, command: str, name: str, body: str) -> str:
    path = os.path.join(cfg.out, name)
    write_atomic(path, _header(cfg, command) + body)
    return path


def _emit_json(cfg: RunConfig, command: str, name: str, payload) -> str:
    if isinstance(payload, str):
        payload = json.loads(payload)
    payload = {"meta": {"version": __version__, "command": command,
                        "config": cfg.digest()}, **payload}
    path = os.path.join(cfg.out, name)
    write_atomic(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return path


# ---------------------------------------------------------------------------
# commands

def _graph(cfg: RunConfig):
    p = cfg.profile_obj()
    strip = default_strip(p, cfg.im_cutoff)
    return p, assemble_graph(p, strip, tol=cfg.trace_tol,
                             lambda0_tol=cfg.newton_tol)


def cmd_graph(cfg: RunConfig) -> list[str]:
    p, g = _graph(cfg)
    files = [_emit_csv(cfg, "graph", "graph.csv", g.to_csv())]
    summary = {
        "lambda0": [g.lambda0.real, g.lambda0.imag],
        "endpoints": {k: [v.real, v.imag] for k, v in
                      ((k, c.endpoint if c.endpoint is not None
                        else c.vertices[-1]) for k, c in g.curves.items())},
        "vertex_counts": {k: len(c.vertices) for k, c in g.curves.items()},
        "strip": {"a": p.a, "b": p.b, "im_cutoff": g.strip.im_cutoff},
    }
    files.append(_emit_json(cfg, "graph", "graph_summary.json", summary))
    return files


def _spectrum(cfg: RunConfig, which: str):
    p = cfg.profile_obj()
    if which == "os":
        def builder(n):
            return build_os(p, cfg.alpha, cfg.reynolds, n)
    else:
        def builder(n):
            return build_model(p, cfg.epsilon, n,
                               hermitian=(which == "hermitian"))
    low = eigensolve(builder(cfg.n))
    high = eigensolve(builder(2 * cfg.n))
    filter_spurious(low, high, tol=cfg.filter_tol)
    return low


def cmd_spectrum(cfg: RunConfig) -> list[str]:
    spec = _spectrum(cfg, cfg.which)
    return [_emit_csv(cfg, "spectrum", f"spectrum_{cfg.which}.csv",
                      spec.to_csv())]


def cmd_wkb(cfg: RunConfig) -> list[str]:
    p, g = _graph(cfg)
    enum = enumerate_wkb(p, cfg.epsilon, g, delta=cfg.delta,
                         tol=cfg.newton_tol)
    return [_emit_csv(cfg, "wkb", "wkb.csv", enum.to_csv())]


def cmd_compare(cfg: RunConfig) -> list[str]:
    p, g = _graph(cfg)
    enum = enumerate_wkb(p, cfg.epsilon, g, delta=cfg.delta,
                         tol=cfg.newton_tol)
    model = _spectrum(cfg, "model")
    trusted = [complex(v) for v in model.trusted_eigenvalues()]
    files = [_emit_csv(cfg, "compare", "wkb.csv", enum.to_csv()),
             _emit_csv(cfg, "compare", "spectrum_model.csv", model.to_csv())]
    radius = 10.0 * cfg.epsilon ** 2
    report = match_spectra(enum.eigenvalues, trusted, radius)
    payload = json.loads(report.to_json())
    if not trusted:
        payload["summary"]["note"] = "insufficient resolution: no trusted modes"
    if cfg.with_os:
        os_spec = _spectrum(cfg, "os")
        files.append(_emit_csv(cfg, "compare", "spectrum_os.csv",
                               os_spec.to_csv()))
        exclusions = [complex(p.a), complex(p.b), g.lambda0]

        def trim(vals):
            return [v for v in vals
                    if all(abs(v - e) > cfg.delta for e in exclusions)
                    and v.imag >= -g.strip.im_cutoff + cfg.delta]

        payload["hausdorff_model_os"] = hausdorff(
            trim(trusted), trim(os_spec.trusted_eigenvalues()))
    files.append(_emit_json(cfg, "compare", "match.json", payload))
    return files


def cmd_pseudo(cfg: RunConfig) -> list[str]:
    p = cfg.profile_obj()
    if cfg.which == "os":
        op = build_os(p, cfg.alpha, cfg.reynolds, cfg.n)
    else:
        op = build_model(p, cfg.epsilon, cfg.n,
                         hermitian=(cfg.which == "hermitian"))
    if cfg.rect is None:
        strip = default_strip(p, cfg.im_cutoff)
        cfg.rect = (p.a, p.b, -strip.im_cutoff, 0.0)
    grid = pseudospectra(op, cfg.rect, cfg.nx, cfg.ny, cfg.norm)
    files = [_emit_csv(cfg, "pseudo", "pseudo.csv", grid.to_csv())]
    # the probe-region boundary, so downstream renderers can overlay it
    # without recomputing the graph
    omega = omega_region(assemble_graph(p, default_strip(p, cfg.im_cutoff),
                                        tol=cfg.trace_tol))
    body = "re,im\n" + "".join(f"{v.real:.16g},{v.imag:.16g}\n"
                               for v in omega.boundary)
    files.append(_emit_csv(cfg, "pseudo", "omega.csv", body))
    return files


def cmd_growth(cfg: RunConfig) -> list[str]:
    p = cfg.profile_obj()
    eps_list = cfg.eps_list or [1 / 20, 1 / 25, 1 / 30, 1 / 40, 1 / 50]
    builder = cfg.which if cfg.which != "model" else "model"
    if cfg.target == "riesz":
        report = riesz_growth_fit(p, eps_list, builder=builder,
                                  norm_kind=cfg.norm, alpha=cfg.alpha)
    else:
        if cfg.lam is None:
            raise ConfigError("growth --target resolvent requires --lam re,im")
        if cfg.which != "hermitian":
            _, g = _graph(cfg)
            if not omega_region(g).contains(cfg.lam):
                raise ConfigError(
                    f"probe {cfg.lam} lies outside the region bounded by "
                    f"gamma_plus, gamma_minus and [a,b]")
        report = growth_fit(p, cfg.lam, eps_list, builder=builder,
                            norm_kind=cfg.norm, alpha=cfg.alpha)
    name = f"growth_{cfg.target}.json"
    return [_emit_json(cfg, "growth", name, json.loads(report.to_json()))]


def cmd_validate(cfg: RunConfig) -> list[str]:
    p = cfg.profile_obj()
    report = validate_am(p, im_cutoff=cfg.im_cutoff)
    path = _emit_json(cfg, "validate", "validate.json", report.as_dict())
    if not report.passed:
        raise ConfigError(f"profile {cfg.profile!r} failed AM validation")
    return [path]


_COMMANDS = {
    "graph": cmd_graph,
    "spectrum": cmd_spectrum,
    "wkb": cmd_wkb,
    "compare": cmd_compare,
    "pseudo": cmd_pseudo,
    "growth": cmd_growth,
    "validate": cmd_validate,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limitspec",
        description="Limit spectral graphs, WKB eigenvalues, collocation "
                    "spectra, pseudospectra and growth sweeps.")
    parser.add_argument("--version", action="version",
                        version=f"limitspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cp = sub.add_parser(name)
        cp.add_argument("--profile")
        cp.add_argument("--alpha", type=float)
        group = cp.add_mutually_exclusive_group()
        group.add_argument("--epsilon", type=float)
        group.add_argument("--reynolds", type=float)
        cp.add_argument("--n", type=int)
        cp.add_argument("--delta", type=float)
        cp.add_argument("--im-cutoff", dest="im_cutoff", type=float)
        cp.add_argument("--out")
        cp.add_argument("--config")
        if name in ("spectrum", "pseudo", "growth"):
            cp.add_argument("--which", choices=("model", "os", "hermitian"))
        if name == "compare":
            cp.add_argument("--with-os", dest="with_os", action="store_true",
                            default=None)
        if name == "growth":
            cp.add_argument("--target", choices=("resolvent", "riesz"))
            cp.add_argument("--lam")
            cp.add_argument("--eps-list", dest="eps_list")
            cp.add_argument("--norm", choices=("L2", "Sobolev"))
        if name == "pseudo":
            cp.add_argument("--rect")
            cp.add_argument("--nx", type=int)
            cp.add_argument("--ny", type=int)
            cp.add_argument("--norm", choices=("L2", "Sobolev"))
    return parser


def _write_error(out: str, command: str, exc: Exception, params: dict) -> None:
    payload = {
        "error": type(exc).__name__,
        "module": type(exc).__module__,
        "operation": command,
        "message": str(exc),
        "parameters": params,
    }
    try:
        write_atomic(os.path.join(out or ".", "error.json"),
                     json.dumps(payload, sort_keys=True, indent=2) + "\n")
    except OSError:
        pass
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    out = getattr(args, "out", None) or "."
    try:
        cfg = build_runconfig(args)
    except ConfigError as exc:
        _write_error(out, args.command, exc, {"argv": sys.argv[1:]})
        return 2
    try:
        files = _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        _write_error(cfg.out, args.command, exc, cfg.as_dict())
        return 2
    except LimitspecError as exc:
        _write_error(cfg.out, args.command, exc, cfg.as_dict())
        return 3
    for path in files:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

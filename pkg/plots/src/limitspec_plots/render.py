"""Figure renderers: spectral portraits, pseudospectra maps, growth fits.

Each renderer takes a FigureSpec pointing at files produced by the
limitspec CLI and writes one image. Everything drawn comes straight from
those files; the only transformations applied are axis changes (1/eps,
log scales).
"""

import os
from dataclasses import dataclass, field

import matplotlib
import numpy as np

matplotlib.use("Agg")
# content-hashed element ids make repeated SVG renders byte-identical
matplotlib.rcParams["svg.hashsalt"] = "limitspec-plots"
import matplotlib.pyplot as plt  # noqa: E402

from . import SchemaError, io  # noqa: E402

DEFAULT_LEVELS = tuple(range(2, 15, 2))

# strip creation dates so identical inputs give identical bytes
_METADATA = {"png": {"Software": "limitspec-plots"},
             "svg": {"Date": None}}

_CURVE_STYLE = {"plus": dict(color="tab:blue", label=r"$\gamma_+$"),
                "minus": dict(color="tab:green", label=r"$\gamma_-$"),
                "infinity": dict(color="tab:purple",
                                 label=r"$\gamma_\infty$")}


@dataclass
class FigureSpec:
    kind: str  # portrait | pseudo | growth
    inputs: dict[str, str]  # role -> file path
    out: str
    window: tuple[float, float, float, float] | None = None
    levels: tuple[float, ...] = field(default=DEFAULT_LEVELS)

    def __post_init__(self):
        if self.kind not in ("portrait", "pseudo", "growth"):
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        for role, path in self.inputs.items():
            if not os.path.isfile(path):
                raise SchemaError(f"{role} input {path} does not exist")


def _save(fig, out: str) -> None:
    ext = os.path.splitext(out)[1].lstrip(".").lower() or "png"
    fig.savefig(out, metadata=_METADATA.get(ext), dpi=150)
    plt.close(fig)


def _finish(fig, ax, spec: FigureSpec) -> str:
    if spec.window is not None:
        ax.set_xlim(spec.window[0], spec.window[1])
        ax.set_ylim(spec.window[2], spec.window[3])
    _save(fig, spec.out)
    return spec.out


def render_portrait(spec: FigureSpec) -> str:
    """Graph curves, trusted/untrusted eigenvalue markers, WKB circles."""
    lambda0, curves = io.load_graph(spec.inputs["graph"])
    fig, ax = plt.subplots(figsize=(6, 5))
    for kind, verts in sorted(curves.items()):
        style = _CURVE_STYLE.get(kind, dict(color="gray", label=kind))
        ax.plot(verts.real, verts.imag, lw=1.5, **style)
    ax.plot(lambda0.real, lambda0.imag, "kd", ms=7)
    ax.annotate(r"$\lambda_0$", (lambda0.real, lambda0.imag),
                textcoords="offset points", xytext=(6, 4))
    ends = [v for c in curves.values() for v in (c[0], c[-1])
            if abs(v.imag) < 1e-6]
    for name, v in zip("ab", sorted(ends, key=lambda z: z.real)):
        ax.annotate(name, (v.real, v.imag),
                    textcoords="offset points", xytext=(0, 6))

    if "spectrum" in spec.inputs:
        lams, trusted = io.load_spectrum(spec.inputs["spectrum"])
        if len(lams) == 0:
            ax.annotate("empty spectrum file", (0.5, 0.5),
                        xycoords="axes fraction", ha="center",
                        color="tab:red")
        else:
            ax.plot(lams[trusted].real, lams[trusted].imag, "o",
                    color="k", ms=4, ls="none", label="trusted")
            ax.plot(lams[~trusted].real, lams[~trusted].imag, "x",
                    color="0.6", ms=4, ls="none", label="untrusted")
    if "wkb" in spec.inputs:
        mus = io.load_wkb(spec.inputs["wkb"])
        ax.plot(mus.real, mus.imag, "s", mfc="none", mec="tab:red",
                ms=8, ls="none", label="WKB")

    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    ax.legend(loc="lower right", fontsize=8)
    ax.set_aspect("equal", adjustable="box")
    if spec.window is None:
        # frame the graph itself; deep spurious modes would otherwise
        # stretch the autoscaled axes by orders of magnitude
        allv = np.concatenate(list(curves.values()))
        pad_x = 0.1 * (allv.real.max() - allv.real.min() or 1.0)
        pad_y = 0.1 * (allv.imag.max() - allv.imag.min() or 1.0)
        ax.set_xlim(allv.real.min() - pad_x, allv.real.max() + pad_x)
        ax.set_ylim(allv.imag.min() - pad_y, allv.imag.max() + pad_y)
    return _finish(fig, ax, spec)


def render_pseudo(spec: FigureSpec) -> str:
    """Filled log10 resolvent-norm contours, saturation hatching, the
    probe-region boundary, and optionally the graph curves."""
    re, im, val, sat = io.load_pseudo(spec.inputs["pseudo"])
    fig, ax = plt.subplots(figsize=(6, 5))
    levels = sorted(spec.levels)
    cs = ax.contourf(re, im, np.clip(val, levels[0], levels[-1]),
                     levels=levels, cmap="viridis", extend="both")
    fig.colorbar(cs, ax=ax, label=r"$\log_{10}\|(L-\lambda)^{-1}\|$")
    if sat.any():
        ax.contourf(re, im, sat.astype(float), levels=[0.5, 1.5],
                    colors="none", hatches=["////"])
    if "omega" in spec.inputs:
        b = io.load_omega(spec.inputs["omega"])
        ax.plot(b.real, b.imag, "w--", lw=1.5, label=r"$\partial\Omega$")
    if "graph" in spec.inputs:
        _, curves = io.load_graph(spec.inputs["graph"])
        for verts in curves.values():
            ax.plot(verts.real, verts.imag, color="w", lw=0.8)
    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="lower right", fontsize=8)
    return _finish(fig, ax, spec)


def render_growth(spec: FigureSpec) -> str:
    """log value against 1/eps with the fitted line and rate annotation."""
    data = io.load_growth(spec.inputs["growth"])
    x = np.array([1.0 / s["eps"] for s in data["samples"]])
    y = np.array([np.log(s["value"]) for s in data["samples"]])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, y, "ko", label="samples")
    if len(x) >= 2:
        xs = np.linspace(x.min(), x.max(), 2)
        ax.plot(xs, data["slope"] * xs + data["intercept"], "r-",
                label=f"slope = {data['slope']:.3f}, "
                      f"$r^2$ = {data['r_squared']:.4f}")
    else:
        ax.annotate("single sample: no fit", (0.5, 0.9),
                    xycoords="axes fraction", ha="center",
                    color="tab:red")
    for s in data.get("skipped", []):
        ax.axvline(1.0 / s["eps"], color="0.8", ls=":")
    ax.set_xlabel(r"$1/\varepsilon$")
    ax.set_ylabel(f"log {data.get('quantity', 'value')} "
                  f"({data.get('norm_kind', '')})")
    ax.legend(loc="upper left", fontsize=8)
    return _finish(fig, ax, spec)


RENDERERS = {"portrait": render_portrait, "pseudo": render_pseudo,
             "growth": render_growth}

"""Numerical evaluation of the oscillatory forms: tensor-grid quadrature
of exp(i*lambda*P(x)) * prod_j f_j(pi_j x) over a box, lambda sweeps,
power-law decay fits, and the modulated bump factors that cancel a
degenerate phase exactly.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .linalg import Mat
from .poly import MultiPoly, compose

DEFAULT_NODE_CAPS = {1: 4096, 2: 4096, 3: 512, 4: 64}
MIN_NODES_PER_AXIS = 8
CHUNK_LIMIT = 1 << 21  # max points evaluated per numpy call


class NodeCapExceeded(Exception):
    """Grid refinement hit the per-axis cap before converging.

    Carries the last two estimates so the caller can see how far apart
    they are.
    """

    def __init__(self, prev: complex, last: complex, nodes: int):
        super().__init__(f"no convergence at {nodes} nodes/axis "
                         f"(last two estimates {prev!r}, {last!r})")
        self.prev = prev
        self.last = last
        self.nodes = nodes


class InsufficientTail(Exception):
    """Fewer than 3 usable rows above the fit threshold."""


@dataclass
class BumpSpec:
    """Smooth cutoff prod_i exp(-1/(1-s_i^2)) on a box (rescaled to
    [-1, 1] per axis, zero outside), optionally modulated by
    exp(-i*lam*Q(t))."""

    box: list[tuple[Fraction, Fraction]]
    modulation: Optional[tuple[MultiPoly, float]] = None

    @property
    def kind(self) -> str:
        return "modulated-bump" if self.modulation else "smooth-bump"

    def __post_init__(self):
        self.box = [(Fraction(lo), Fraction(hi)) for lo, hi in self.box]
        for lo, hi in self.box:
            if not lo < hi:
                raise ValueError("empty or unbounded box axis")
        if self.modulation is not None:
            q, lam = self.modulation
            if q.num_vars != len(self.box):
                raise ValueError("modulation variable count != box dimension")

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        """Evaluate on points of shape (..., dim); complex if modulated."""
        val = np.ones(t.shape[:-1], dtype=float)
        for i, (lo, hi) in enumerate(self.box):
            lo_f, hi_f = float(lo), float(hi)
            s = (2.0 * t[..., i] - (lo_f + hi_f)) / (hi_f - lo_f)
            inside = np.abs(s) < 1.0
            axis = np.zeros_like(s)
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                axis[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
            val = val * axis
        if self.modulation is None:
            return val
        q, lam = self.modulation
        return val * np.exp(-1j * lam * q.evaluate_array(t))


@dataclass
class QuadConfig:
    domain_box: list[tuple[Fraction, Fraction]]
    nodes_per_axis: int = 16
    rule: str = "gauss-legendre"
    refine_tol: float = 1e-4
    max_nodes_per_axis: Optional[int] = None

    def __post_init__(self):
        self.domain_box = [(Fraction(lo), Fraction(hi)) for lo, hi in self.domain_box]
        if self.nodes_per_axis < MIN_NODES_PER_AXIS:
            raise ValueError(f"nodes_per_axis must be >= {MIN_NODES_PER_AXIS}")
        if self.rule not in ("gauss-legendre", "midpoint"):
            raise ValueError(f"unknown rule {self.rule!r}")

    def node_cap(self) -> int:
        if self.max_nodes_per_axis is not None:
            return self.max_nodes_per_axis
        m = len(self.domain_box)
        return DEFAULT_NODE_CAPS.get(m, 64)


@dataclass
class SweepRow:
    lam: float
    value: Optional[complex]
    abs: float
    nodes: int
    error: Optional[str] = None


@dataclass
class FitResult:
    rho: float
    logC: float
    r2: float


@dataclass
class DecaySweep:
    rows: list[SweepRow] = field(default_factory=list)
    fit: Optional[FitResult] = None


def _axis_rule(lo: float, hi: float, n: int, rule: str):
    if rule == "midpoint":
        h = (hi - lo) / n
        x = lo + h * (np.arange(n) + 0.5)
        w = np.full(n, h)
    else:
        x, w = np.polynomial.legendre.leggauss(n)
        x = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        w = 0.5 * (hi - lo) * w
    return x, w


def _integrand(points: np.ndarray, p: MultiPoly, lam: float,
               pis: Sequence[Mat], fs: Sequence[BumpSpec]) -> np.ndarray:
    phase = lam * p.evaluate_array(points)
    val = np.exp(1j * phase)
    for pi, f in zip(pis, fs):
        t = points @ pi.to_float_array().T
        val = val * f.evaluate(t)
    return val


def _tensor_quad(p: MultiPoly, lam: float, pis: Sequence[Mat],
                 fs: Sequence[BumpSpec], cfg: QuadConfig, n: int) -> complex:
    m = len(cfg.domain_box)
    axes = [_axis_rule(float(lo), float(hi), n, cfg.rule) for lo, hi in cfg.domain_box]
    if m == 1:
        pts = axes[0][0][:, None]
        return complex(np.sum(axes[0][1] * _integrand(pts, p, lam, pis, fs)))
    # chunk over the leading axis when the full grid is too large;
    # summation order is fixed by grid index either way
    rest = axes[1:]
    mesh = np.meshgrid(*[x for x, _ in rest], indexing="ij")
    pts_rest = np.stack([g.ravel() for g in mesh], axis=-1)
    w_rest = rest[0][1]
    for _, w in rest[1:]:
        w_rest = np.multiply.outer(w_rest, w)
    w_rest = w_rest.ravel()
    x0, w0 = axes[0]
    if n * pts_rest.shape[0] <= CHUNK_LIMIT:
        full = np.concatenate(
            [np.repeat(x0, pts_rest.shape[0])[:, None],
             np.tile(pts_rest, (n, 1))], axis=1)
        vals = _integrand(full, p, lam, pis, fs).reshape(n, -1)
        return complex(np.sum(w0 * (vals @ w_rest)))
    total = 0.0 + 0.0j
    slab = np.empty((pts_rest.shape[0], m))
    slab[:, 1:] = pts_rest
    for i in range(n):
        slab[:, 0] = x0[i]
        vals = _integrand(slab, p, lam, pis, fs)
        total += w0[i] * complex(np.sum(w_rest * vals))
    return total


def eval_integral(p: MultiPoly, lam: float, pis: Sequence[Mat],
                  fs: Sequence[BumpSpec], cfg: QuadConfig) -> tuple[complex, int]:
    """Quadrature of the oscillatory form, refining the grid by doubling
    nodes per axis until the relative change drops below cfg.refine_tol.

    Returns (value, final nodes per axis); raises NodeCapExceeded if the
    cap is hit first.
    """
    if len(fs) != len(pis):
        raise ValueError("one bump spec per map required")
    m = len(cfg.domain_box)
    if p.num_vars != m:
        raise ValueError("phase variable count != domain dimension")
    for pi, f in zip(pis, fs):
        if pi.rows != len(f.box):
            raise ValueError("bump box dimension != map target dimension")
    cap = cfg.node_cap()
    n = cfg.nodes_per_axis
    prev = None
    while True:
        val = _tensor_quad(p, lam, pis, fs, cfg, n)
        if prev is not None:
            denom = max(abs(val), abs(prev), 1e-300)
            if abs(val - prev) <= cfg.refine_tol * denom:
                return val, n
        if 2 * n > cap:
            if prev is None:
                prev = val
            raise NodeCapExceeded(prev, val, n)
        prev = val
        n *= 2


def adversarial_functions(p: MultiPoly, pis: Sequence[Mat],
                          cert: Sequence[tuple[str, MultiPoly]],
                          boxes: Sequence[Sequence[tuple[Fraction, Fraction]]],
                          lam: float) -> list[BumpSpec]:
    """Modulated bumps f_j(t) = exp(-i*lam*Q_j(t)) * bump(t) whose product
    cancels the phase lam*P exactly, given an exact certificate
    P = sum_j Q_j o pi_j.  The certificate is re-verified before use."""
    if len(cert) != len(pis) or len(boxes) != len(pis):
        raise ValueError("certificate / boxes / maps length mismatch")
    recon = MultiPoly.zero(p.num_vars)
    for (_, q), pi in zip(cert, pis):
        recon = recon + compose(q, pi)
    if recon != p:
        raise ValueError("invalid certificate: pullback sum does not equal the phase")
    return [BumpSpec(box=list(box), modulation=(q, lam))
            for (_, q), box in zip(cert, boxes)]


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("OSCINT_THREADS", "1")))
    except ValueError:
        return 1


def sweep(p: MultiPoly, pis: Sequence[Mat], fs: Sequence[BumpSpec],
          lambdas: Sequence[float], cfg: QuadConfig,
          adversarial_cert: Sequence[tuple[str, MultiPoly]] | None = None) -> DecaySweep:
    """One quadrature row per lambda; rows that fail to converge are kept
    with their last estimate and marked failed.  With a certificate the
    bump factors are re-modulated per lambda.

    Rows are independent; OSCINT_THREADS > 1 evaluates them on a thread
    pool, with the per-row summation order unchanged.
    """
    lams = [float(x) for x in lambdas]
    if len(lams) < 4:
        raise ValueError("need at least 4 lambda values")
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise ValueError("lambdas must be strictly increasing")
    boxes = [f.box for f in fs]

    def run_row(lam: float) -> SweepRow:
        row_fs = fs
        if adversarial_cert is not None:
            row_fs = adversarial_functions(p, pis, adversarial_cert, boxes, lam)
        try:
            val, nodes = eval_integral(p, lam, pis, row_fs, cfg)
            return SweepRow(lam, val, abs(val), nodes)
        except NodeCapExceeded as exc:
            return SweepRow(lam, exc.last, abs(exc.last), exc.nodes,
                            error="node_cap_exceeded")

    workers = _worker_count()
    if workers == 1:
        rows = [run_row(lam) for lam in lams]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_row, lams))
    return DecaySweep(rows=rows)


def fit_decay(s: DecaySweep, tail_from: float = 0.0) -> FitResult:
    """Least-squares fit log|I| = logC - rho*log(1+lambda) on the tail
    rows; stores and returns (rho, logC, r2)."""
    pts = [(r.lam, r.abs) for r in s.rows
           if r.lam >= tail_from and r.value is not None and r.abs > 0.0]
    if len(pts) < 3:
        raise InsufficientTail(f"only {len(pts)} usable rows with lambda >= {tail_from}")
    x = np.log1p([lam for lam, _ in pts])
    y = np.log([a for _, a in pts])
    A = np.stack([-x, np.ones_like(x)], axis=1)
    (rho, logc), res, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ np.array([rho, logc])
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    fit = FitResult(float(rho), float(logc), r2)
    s.fit = fit
    return fit


# ---------------------------------------------------------------------------
# output formats


def sweep_to_csv(s: DecaySweep) -> str:
    lines = ["lambda,re,im,abs,nodes"]
    for r in s.rows:
        re = r.value.real if r.value is not None else float("nan")
        im = r.value.imag if r.value is not None else float("nan")
        lines.append(f"{r.lam!r},{re!r},{im!r},{r.abs!r},{r.nodes}")
    return "\n".join(lines) + "\n"


def sweep_to_json(s: DecaySweep) -> dict:
    return {
        "rows": [{"lambda": r.lam,
                  "re": (r.value.real if r.value is not None else None),
                  "im": (r.value.imag if r.value is not None else None),
                  "abs": r.abs, "nodes": r.nodes, "error": r.error}
                 for r in s.rows],
        "fit": (None if s.fit is None else
                {"rho": s.fit.rho, "logC": s.fit.logC, "r2": s.fit.r2}),
    }

"""Cornered boundary curves, sigmoid grading, and graded Nystrom meshes.

A Curve is a closed, piecewise-analytic, counterclockwise 2pi-periodic
parametrization split at its corners.  Corner parameters are placed
proportionally to arc length (one global constant), so the un-graded
parametrization has globally constant speed on polygons.  The graded
parametrization composes each segment with the order-p sigmoid, whose
derivatives vanish at the corner parameters; mesh nodes are shifted off
the uniform grid by half a spacing so they never land on corners.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class SigmoidParams:
    """Polynomial order of the grading; p >= 2.  p = 3 is the default
    everywhere except the single-equation formulation, which uses p = 4."""

    p: int = 3

    def __post_init__(self):
        if self.p < 2:
            raise GeometryError("sigmoid order p must be >= 2")


@dataclass(frozen=True)
class Segment:
    """One analytic arc, parametrized over the unit interval."""

    point: callable      # u in [0,1] -> (2,) array
    deriv: callable      # du
    deriv2: callable     # du^2

    def arc_length(self):
        val, err = quad(lambda u: float(np.hypot(*self.deriv(u))), 0.0, 1.0,
                        epsabs=1e-13, epsrel=1e-13, limit=200)
        return val


def _line_segment(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    z = np.zeros(2)
    return Segment(point=lambda u, a=a, d=d: a + u * d,
                   deriv=lambda u, d=d: d,
                   deriv2=lambda u, z=z: z)


class Curve:
    """Closed piecewise-analytic curve with corner list and grading order.

    segments[j] covers parameter range [breaks[j], breaks[j+1]] with
    breaks[0] = 0, breaks[-1] = 2pi, placed proportionally to arc length.
    corners holds the parameters T_j that are true corners (for a smooth
    curve it is empty and the grading is the identity).
    """

    def __init__(self, segments, corner_angles=None, sigmoid=SigmoidParams(), closed_smooth=False):
        self.segments = list(segments)
        self.sigmoid = sigmoid
        lengths = np.array([s.arc_length() for s in self.segments])
        self.length = float(lengths.sum())
        self.breaks = np.concatenate(([0.0], 2.0 * np.pi * np.cumsum(lengths) / self.length))
        self.breaks[-1] = 2.0 * np.pi
        self.closed_smooth = bool(closed_smooth)
        if self.closed_smooth:
            if len(self.segments) != 1:
                raise GeometryError("a smooth closed curve must be a single segment")
            self.corners = np.empty(0)
            self.corner_angles = np.empty(0)
        else:
            self.corners = self.breaks[:-1].copy()
            if corner_angles is None:
                raise GeometryError("corner angles required for a cornered curve")
            self.corner_angles = np.asarray(corner_angles, dtype=float)
            if self.corner_angles.shape != self.corners.shape:
                raise GeometryError("one interior angle per corner required")
            if np.any(self.corner_angles <= 0) or np.any(self.corner_angles >= 2 * np.pi):
                raise GeometryError("interior angles must lie in (0, 2pi)")
        # closure check on the un-graded parametrization
        p0 = self.segments[0].point(0.0)
        p1 = self.segments[-1].point(1.0)
        if not np.allclose(p0, p1, atol=1e-12):
            raise GeometryError("curve is not closed")

    # -- sigmoid grading -------------------------------------------------

    def _segment_index(self, t):
        t = np.mod(t, 2.0 * np.pi)
        j = np.searchsorted(self.breaks, t, side="right") - 1
        return np.clip(j, 0, len(self.segments) - 1), t

    def sigmoid_w(self, s, j=None):
        """Graded parameter w(s) on the segment containing s (or segment j)."""
        w, _, _ = self.sigmoid_jet(s, j)
        return w

    def sigmoid_jet(self, s, j=None):
        """w, w', w'' of the grading at parameter s (arrays ok)."""
        s = np.asarray(s, dtype=float)
        if self.closed_smooth:
            one = np.ones_like(s)
            return s, one, np.zeros_like(s)
        if j is None:
            j, s = self._segment_index(s)
        else:
            j = np.broadcast_to(np.asarray(j), np.shape(s)) if np.ndim(s) else j
        ta = self.breaks[j]
        tb = self.breaks[np.asarray(j) + 1]
        if np.any(s < ta - 1e-12) or np.any(s > tb + 1e-12):
            raise GeometryError("parameter outside segment range")
        p = self.sigmoid.p
        dt = tb - ta
        xi = (2.0 * s - ta - tb) / dt                    # in [-1, 1]
        c3 = 0.5 - 1.0 / p
        v = c3 * xi**3 + xi / p + 0.5
        dv = (3.0 * c3 * xi**2 + 1.0 / p) * (2.0 / dt)
        ddv = 6.0 * c3 * xi * (2.0 / dt) ** 2
        v = np.clip(v, 0.0, 1.0)
        a = v**p
        b = (1.0 - v) ** p
        den = a + b
        w = (tb * a + ta * b) / den
        g = v ** (p - 1) * (1.0 - v) ** (p - 1)
        wp = p * dt * g * dv / den**2
        # derivative of wp: product/quotient rule pieces
        gp = (p - 1) * dv * (v ** (p - 2) * (1.0 - v) ** (p - 1)
                             - v ** (p - 1) * (1.0 - v) ** (p - 2))
        dden = p * dv * (v ** (p - 1) - (1.0 - v) ** (p - 1))
        wpp = p * dt * ((gp * dv + g * ddv) / den**2 - 2.0 * g * dv * dden / den**3)
        return w, wp, wpp

    # -- evaluation ------------------------------------------------------

    def eval(self, t):
        """Graded parametrization data at parameters t.

        Returns (x, dx, ddx, nu, jac): point, first and second derivative of
        the graded map, weighted normal nu = (dx2, -dx1), and jacobian |dx|.
        Leading array shape follows t; the vector quantities get a trailing
        axis of length 2.
        """
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        j, tm = self._segment_index(t)
        w, wp, wpp = self.sigmoid_jet(tm, j)
        x = np.empty(t.shape + (2,))
        dx = np.empty_like(x)
        ddx = np.empty_like(x)
        for jj in np.unique(j):
            m = j == jj
            seg = self.segments[jj]
            ta, tb = self.breaks[jj], self.breaks[jj + 1]
            inv = 1.0 / (tb - ta)
            u = (_clip01((w[m] - ta) * inv))
            du = wp[m] * inv
            ddu = wpp[m] * inv
            y = np.array([seg.point(ui) for ui in u])
            yp = np.array([seg.deriv(ui) for ui in u])
            ypp = np.array([seg.deriv2(ui) for ui in u])
            x[m] = y
            dx[m] = yp * du[:, None]
            ddx[m] = ypp * du[:, None] ** 2 + yp * ddu[:, None]
        nu = np.stack([dx[..., 1], -dx[..., 0]], axis=-1)
        jac = np.hypot(dx[..., 0], dx[..., 1])
        if scalar:
            return x[0], dx[0], ddx[0], nu[0], jac[0]
        return x, dx, ddx, nu, jac


def _clip01(u):
    return np.clip(u, 0.0, 1.0)


@dataclass
class GradedMesh:
    """2n shifted nodes on a graded curve with cached per-node geometry."""

    curve: Curve
    n: int
    t: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    dx: np.ndarray = field(repr=False)
    ddx: np.ndarray = field(repr=False)
    nu: np.ndarray = field(repr=False)
    jac: np.ndarray = field(repr=False)

    @property
    def h(self):
        return np.pi / self.n

    @property
    def size(self):
        return 2 * self.n


def build_mesh(curve, n, shift_sign=+1):
    """Graded mesh with 2n nodes t_i = i*pi/n + shift_sign*pi/(2n)."""
    if n < 8:
        raise GeometryError("need n >= 8")
    if shift_sign not in (+1, -1):
        raise GeometryError("shift_sign must be +1 or -1")
    h = np.pi / n
    t = (np.arange(2 * n) + 0.5 * shift_sign) * h
    t = np.mod(t, 2.0 * np.pi)
    if curve.corners.size:
        gaps = np.abs(t[:, None] - curve.corners[None, :])
        gaps = np.minimum(gaps, 2.0 * np.pi - gaps)
        if gaps.min() < 1e-9 * h:
            raise GeometryError("a mesh node collides with a corner parameter")
    x, dx, ddx, nu, jac = curve.eval(t)
    if np.any(jac <= 0.0):
        raise GeometryError("vanishing jacobian at a mesh node")
    return GradedMesh(curve=curve, n=n, t=t, x=x, dx=dx, ddx=ddx, nu=nu, jac=jac)


# -- builtin geometries ---------------------------------------------------

def polygon(vertices, sigmoid=SigmoidParams()):
    """Counterclockwise simple polygon through the given vertices."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 2:
        raise GeometryError("need at least three 2D vertices")
    area2 = np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
    if area2 <= 0:
        raise GeometryError("vertices must be ordered counterclockwise")
    segs = [_line_segment(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]
    angles = []
    for i in range(len(v)):
        a = v[(i + 1) % len(v)] - v[i]
        b = v[i - 1] - v[i]
        ang = np.arctan2(a[0] * b[1] - a[1] * b[0], a @ b)
        angles.append(np.mod(ang, 2.0 * np.pi))
    return Curve(segs, corner_angles=angles, sigmoid=sigmoid)


def square(side=4.0, sigmoid=SigmoidParams()):
    if side <= 0:
        raise GeometryError("side must be positive")
    s = side / 2.0
    return polygon([(s, -s), (s, s), (-s, s), (-s, -s)], sigmoid=sigmoid)


def ushape(side=4.0, indent=2.0, sigmoid=SigmoidParams()):
    """Block-letter U: a square of the given side with a centered slot of
    width `indent` cut from one edge, limbs of uniform thickness
    (side - indent)/2.  Eight corners, two of them reentrant; the opening
    faces +x, broadside to the default (0, -1) incidence.  The defaults
    (side 4, indent 2) give slot depth 3 and perimeter 22."""
    if not (0 < indent < side):
        raise GeometryError("need 0 < indent < side")
    s = side / 2.0
    w = indent / 2.0
    t = (side - indent) / 2.0      # limb thickness
    b = s - (side - t)             # slot back wall, x = -(s - t)
    verts = [(s, -s), (s, -w), (b, -w), (b, w), (s, w), (s, s),
             (-s, s), (-s, -s)]
    return polygon(verts, sigmoid=sigmoid)


def lq_ball(q=512, radius=2.0):
    """Smooth ball x1^q + x2^q = radius^q (q even) in polar parametrization.

    q = 2 is the disk; large even q is a rounded square.  Corner-free, so the
    grading is the identity.
    """
    if q < 2 or q % 2 != 0:
        raise GeometryError("q must be an even integer >= 2")
    if radius <= 0:
        raise GeometryError("radius must be positive")
    q = int(q)

    def _r(th):
        c, s = np.cos(th), np.sin(th)
        # stable log-sum-exp style evaluation of (|c|^q + |s|^q)^(1/q)
        ac, as_ = np.abs(c), np.abs(s)
        m = np.maximum(ac, as_)
        sm = np.minimum(ac, as_) / np.where(m > 0, m, 1.0)
        return radius / (m * (1.0 + sm**q) ** (1.0 / q))

    def point(u):
        th = 2.0 * np.pi * u
        return _r(th) * np.array([np.cos(th), np.sin(th)])

    def deriv(u):
        th = 2.0 * np.pi * u
        r, dr = _r_and_dr(th)
        c, s = np.cos(th), np.sin(th)
        return 2.0 * np.pi * np.array([dr * c - r * s, dr * s + r * c])

    def _r_and_dr(th):
        c, s = np.cos(th), np.sin(th)
        r = _r(th)
        num = np.abs(c) ** (q - 1) * np.sign(c) * s - np.abs(s) ** (q - 1) * np.sign(s) * c
        den = np.abs(c) ** q + np.abs(s) ** q
        # dr/dth = r * (c^{q-1} s - s^{q-1} c)/(c^q + s^q)  (q even)
        return r, r * num / den

    def deriv2(u):
        # second derivative by analytic differentiation of the polar form
        th = 2.0 * np.pi * u
        c, s = np.cos(th), np.sin(th)
        r, dr = _r_and_dr(th)
        den = c**q + s**q
        num = c ** (q - 1) * s - s ** (q - 1) * c
        g = num / den
        dnum = -(q - 1) * c ** (q - 2) * s**2 + c**q - (q - 1) * s ** (q - 2) * c**2 + s**q
        dden = q * (-(c ** (q - 1)) * s + s ** (q - 1) * c)
        dg = dnum / den - num * dden / den**2
        ddr = dr * g + r * dg
        e = np.array([c, s])
        ep = np.array([-s, c])
        return (2.0 * np.pi) ** 2 * (ddr * e + 2.0 * dr * ep - r * e)

    seg = Segment(point=point, deriv=deriv, deriv2=deriv2)
    return Curve([seg], closed_smooth=True)


def builtin_geometry(kind, **params):
    """Factory for the named geometries: square, ushape, lq_ball, polygon."""
    kind = kind.lower()
    if kind == "square":
        return square(**params)
    if kind == "ushape":
        return ushape(**params)
    if kind == "lq_ball":
        return lq_ball(**params)
    if kind == "polygon":
        return polygon(**params)
    raise GeometryError(f"unknown geometry kind {kind!r}")


def singular_exponents(theta, rho):
    """Corner exponents lambda in (-1, 0) of the Neumann-trace singularity.

    Solves sin(lambda*pi - (1+lambda)*theta)/sin(lambda*pi) = -+ (rho+1)/(rho-1)
    for both signs; returns the sorted real solutions found in (-1, 0).
    Diagnostic helper (the solver itself only needs the graded weights).
    """
    if rho <= 0 or rho == 1.0:
        raise GeometryError("need rho > 0, rho != 1")
    rhs = (rho + 1.0) / (rho - 1.0)
    roots = []
    for sgn in (+1.0, -1.0):
        def f(lam):
            return np.sin(lam * np.pi - (1.0 + lam) * theta) - sgn * rhs * np.sin(lam * np.pi)
        lams = np.linspace(-1.0 + 1e-9, -1e-9, 4001)
        vals = f(lams)
        for i in range(len(lams) - 1):
            if np.isfinite(vals[i]) and np.isfinite(vals[i + 1]) and vals[i] * vals[i + 1] < 0:
                roots.append(brentq(f, lams[i], lams[i + 1], xtol=1e-14))
    return sorted(set(np.round(roots, 12)))

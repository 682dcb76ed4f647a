# Copyright (C) 2026  The pyftm developers
#
# This file is part of pyftm.
#
# pyftm is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# pyftm is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with pyftm.  If not, see <http://www.gnu.org/licenses/>.

"""
Complex short-range potentials v(x, r) with their transverse Fourier
transforms ~v(x, p) = int d^d r exp(-i p.r) v(x, r) and x-support bounds.
"""

import csv
import functools
import io
import json
import logging
import math
import os
from typing import NamedTuple

import numpy as np
from scipy import special

from pyftm.ftm.core import PotentialError, AliasingError, ConfigError
from pyftm.utils import filesystem

LOGGER = logging.getLogger(__name__)

ENVELOPE_CUTOFF = 1e-12
EDGE_DECAY = 1e-6


class SupportInterval(NamedTuple):
    lower: float
    upper: float

    @property
    def empty(self):
        return not self.upper > self.lower

    @property
    def width(self):
        return 0.0 if self.empty else self.upper - self.lower

    def contains(self, x):
        return not self.empty and self.lower <= x <= self.upper


EMPTY_SUPPORT = SupportInterval(0.0, 0.0)


def _hull(intervals):
    intervals = [s for s in intervals if not s.empty]
    if not intervals:
        return EMPTY_SUPPORT
    return SupportInterval(min(s.lower for s in intervals), max(s.upper for s in intervals))


def as_complex(value):
    """
    Complex number from a config value: number, [re, im] pair or {"re": .., "im": ..}
    """
    if isinstance(value, dict):
        return complex(float(value.get('re', 0.0)), float(value.get('im', 0.0)))
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError("Complex value must be a [re, im] pair, found %r" % (value,))
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(' ', ''))
    return complex(value)


def _as_momenta(p, d):
    p = np.asarray(p, dtype=float)
    if d == 0 and p.ndim == 0:
        return np.zeros((0,))
    if d == 1 and (p.ndim == 0 or p.shape[-1] != 1):
        p = p[..., None]
    if p.shape[-1] != d:
        raise PotentialError("Momentum of dimension %d expected, found shape %r" % (d, p.shape))
    return p


class DifferenceLattice:
    """
    Distinct momentum differences p_i - p_j of a regular grid.

    unique holds the distinct differences, inverse maps each (i, j) to its row.
    """
    def __init__(self, grid):
        self.grid = grid
        if grid.d == 0:
            self.unique = np.zeros((1, 0))
            self.inverse = np.zeros((1, 1), dtype=int)
            return
        # grid coordinates are half-integer multiples of the spacing
        doubled = np.rint(2.0 * grid.points / grid.spacing).astype(np.int64)
        steps = (doubled[:, None, :] - doubled[None, :, :]) // 2
        unique, inverse = np.unique(steps.reshape(-1, grid.d), axis=0, return_inverse=True)
        self.unique = unique * grid.spacing
        self.inverse = np.asarray(inverse).reshape(grid.size, grid.size)

    def expand(self, values):
        return np.asarray(values)[self.inverse]


class Profile:
    """
    Longitudinal envelope u(x)
    """
    def __call__(self, x):
        raise NotImplementedError

    @property
    def support(self):
        raise NotImplementedError

    @property
    def breakpoints(self):
        support = self.support
        return [] if support.empty else [support.lower, support.upper]

    @property
    def is_real(self):
        return False


class PiecewiseConstant(Profile):
    """
    Piecewise constant profile from non-overlapping ((a, b), value) segments
    """
    def __init__(self, segments):
        self.segments = []
        for (interval, value) in segments:
            (a, b) = (float(interval[0]), float(interval[1]))
            if not b > a:
                raise PotentialError("Segment (%r, %r) is empty or reversed" % (a, b))
            self.segments.append(((a, b), complex(value)))
        self.segments.sort(key=lambda s: s[0][0])
        for ((_, b0), _), ((a1, _), _) in zip(self.segments, self.segments[1:]):
            if a1 < b0:
                raise PotentialError("Segments overlap at x=%r" % a1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        result = np.zeros(x.shape, dtype=complex)
        for ((a, b), value) in self.segments:
            result = np.where((x >= a) & (x < b), value, result)
        return result[()] if result.ndim == 0 else result

    @property
    def support(self):
        if not self.segments:
            return EMPTY_SUPPORT
        return SupportInterval(self.segments[0][0][0], self.segments[-1][0][1])

    @property
    def breakpoints(self):
        return sorted({edge for (interval, _) in self.segments for edge in interval})

    @property
    def is_real(self):
        return all(value.imag == 0 for (_, value) in self.segments)

    def __repr__(self):
        return "PiecewiseConstant(segments=%r)" % (self.segments,)


class GaussianProfile(Profile):
    def __init__(self, amplitude, width, center=0.0):
        if not width > 0:
            raise PotentialError("Gaussian width must be positive, found %r" % (width,))
        self.amplitude = complex(amplitude)
        self.width = float(width)
        self.center = float(center)

    def __call__(self, x):
        return self.amplitude * np.exp(-((np.asarray(x, dtype=float) - self.center) / self.width) ** 2)

    @property
    def support(self):
        if self.amplitude == 0:
            return EMPTY_SUPPORT
        half = self.width * math.sqrt(-math.log(ENVELOPE_CUTOFF))
        return SupportInterval(self.center - half, self.center + half)

    @property
    def is_real(self):
        return self.amplitude.imag == 0

    def fourier(self, q):
        """
        int dx exp(-i q x) u(x)
        """
        q = np.asarray(q, dtype=float)
        return (self.amplitude * self.width * math.sqrt(math.pi)
                * np.exp(-(self.width * q) ** 2 / 4.0) * np.exp(-1j * q * self.center))

    def __repr__(self):
        return "GaussianProfile(amplitude=%r,width=%r,center=%r)" % (self.amplitude, self.width, self.center)


class Sech2Profile(Profile):
    def __init__(self, amplitude, width, center=0.0):
        if not width > 0:
            raise PotentialError("sech^2 width must be positive, found %r" % (width,))
        self.amplitude = complex(amplitude)
        self.width = float(width)
        self.center = float(center)

    def __call__(self, x):
        return self.amplitude / np.cosh((np.asarray(x, dtype=float) - self.center) / self.width) ** 2

    @property
    def support(self):
        if self.amplitude == 0:
            return EMPTY_SUPPORT
        half = self.width * math.acosh(1.0 / math.sqrt(ENVELOPE_CUTOFF))
        return SupportInterval(self.center - half, self.center + half)

    @property
    def is_real(self):
        return self.amplitude.imag == 0

    def __repr__(self):
        return "Sech2Profile(amplitude=%r,width=%r,center=%r)" % (self.amplitude, self.width, self.center)


def profile_from_config(conf):
    kind = conf.get('profile', 'piecewise')
    try:
        if kind == 'piecewise':
            return PiecewiseConstant([((s[0], s[1]), as_complex(s[2])) for s in conf.get('segments', [])])
        if kind == 'barrier':
            return PiecewiseConstant([((conf['lower'], conf['upper']), as_complex(conf['height']))])
        if kind == 'gaussian':
            return GaussianProfile(as_complex(conf['amplitude']), conf['width'], conf.get('center', 0.0))
        if kind == 'sech2':
            return Sech2Profile(as_complex(conf['amplitude']), conf['width'], conf.get('center', 0.0))
    except (KeyError, IndexError, TypeError, ValueError) as e:
        raise ConfigError("Invalid %s profile %r: %s" % (kind, conf, e))
    raise ConfigError("Unknown profile '%s'" % kind)


class PotentialModel:
    """
    Base class for potentials on R^(d+1).
    """
    kind = None

    def __init__(self, d):
        if d not in (0, 1, 2):
            raise PotentialError("Transverse dimension must be 0, 1 or 2, found %r" % (d,))
        self.d = d
        self._operators = {}

    def support_bounds(self):
        raise NotImplementedError

    @property
    def breakpoints(self):
        support = self.support_bounds()
        return [] if support.empty else [support.lower, support.upper]

    @property
    def is_real(self):
        return False

    @property
    def admissible(self):
        """
        Short-range admissibility; analytic kinds are admissible by construction
        """
        return True

    def _transverse(self, x, q):
        """
        ~v(x, q) for x inside the support, q of shape (M, d)
        """
        raise NotImplementedError

    def transverse_fourier(self, x, p, cell=None):
        p = _as_momenta(p, self.d)
        flat = p.reshape(int(np.prod(p.shape[:-1])), self.d)
        if not self.support_bounds().contains(float(x)):
            return np.zeros(p.shape[:-1], dtype=complex)
        return np.asarray(self._transverse(float(x), flat), dtype=complex).reshape(p.shape[:-1])

    def _operator(self, grid):
        lattice = DifferenceLattice(grid)
        scale = grid.weights[None, :] / (2.0 * math.pi) ** grid.d

        def apply(x):
            return lattice.expand(self._transverse(x, lattice.unique)) * scale

        return apply

    def convolution_operator(self, grid):
        """
        Callable x -> V(x) with V[i, j] = ~v(x, p_i - p_j) w_j / (2 pi)^d
        """
        if grid.d != self.d:
            raise PotentialError("Potential of dimension d=%d used on a d=%d grid" % (self.d, grid.d))
        try:
            return self._operators[grid]
        except KeyError:
            pass
        support = self.support_bounds()
        inner = self._operator(grid)
        zero = np.zeros((grid.size, grid.size), dtype=complex)

        def operator(x):
            x = float(x)
            if not support.contains(x):
                return zero
            return inner(x)

        self._operators[grid] = operator
        return operator

    def as_line(self):
        """
        Equivalent d=0 potential when v depends on x alone

        :return: a PotentialModel with d=0, or None
        """
        return self if self.d == 0 else None

    def scaled(self, factor):
        return ScaledPotential(self, factor)

    def __add__(self, other):
        return SumPotential([self, other])


class XOnlyPotential(PotentialModel):
    """
    v(x, r) = u(x); its transverse transform is u(x) (2 pi)^d delta(p)
    """
    kind = 'x_only'

    def __init__(self, profile, d=0):
        super().__init__(d)
        self.profile = profile

    def support_bounds(self):
        return self.profile.support

    @property
    def breakpoints(self):
        return self.profile.breakpoints

    @property
    def is_real(self):
        return self.profile.is_real

    def as_line(self):
        return XOnlyPotential(self.profile, 0)

    def value(self, x):
        return self.profile(x)

    def transverse_fourier(self, x, p, cell=None):
        """
        On-grid delta convention: delta(p) -> 1/cell at p=0, cell being the
        quadrature weight of the grid point.
        """
        p = _as_momenta(p, self.d)
        u = complex(self.profile(float(x)))
        if self.d == 0:
            return np.full(p.shape[:-1], u)
        if cell is None:
            raise PotentialError("x_only transverse transform is a delta; pass the grid cell weight")
        at_origin = np.all(p == 0.0, axis=-1)
        return np.where(at_origin, u * (2.0 * math.pi) ** self.d / cell, 0.0 + 0j)

    def _operator(self, grid):
        identity = np.eye(grid.size, dtype=complex)

        def apply(x):
            return complex(self.profile(x)) * identity

        return apply

    def __repr__(self):
        return "XOnlyPotential(profile=%r,d=%r)" % (self.profile, self.d)


class ZeroPotential(XOnlyPotential):
    kind = 'zero'

    def __init__(self, d=0):
        super().__init__(PiecewiseConstant([]), d)

    def as_line(self):
        return ZeroPotential(0)

    @property
    def is_real(self):
        return True

    def __repr__(self):
        return "ZeroPotential(d=%r)" % self.d


def zero_potential(d=0):
    return ZeroPotential(d)


class SeparablePotential(PotentialModel):
    """
    v(x, r) = u(x) exp(-|r - r0|^2 / b^2)
    """
    kind = 'separable_product'

    def __init__(self, profile, d, width, center=None):
        super().__init__(d)
        if not width > 0:
            raise PotentialError("Transverse width must be positive, found %r" % (width,))
        self.profile = profile
        self.width = float(width)
        self.center = np.zeros(d) if center is None else np.asarray(center, dtype=float).reshape(d)

    def support_bounds(self):
        return self.profile.support

    @property
    def breakpoints(self):
        return self.profile.breakpoints

    @property
    def is_real(self):
        return self.profile.is_real

    def transverse_shape(self, q):
        q = np.asarray(q, dtype=float).reshape(-1, self.d)
        q2 = np.sum(q * q, axis=-1)
        phase = np.exp(-1j * (q @ self.center)) if self.d else 1.0
        return (self.width * math.sqrt(math.pi)) ** self.d * np.exp(-self.width ** 2 * q2 / 4.0) * phase

    def value(self, x, r):
        r = np.asarray(r, dtype=float).reshape(-1, self.d)
        shift = r - self.center[None, :]
        return self.profile(x) * np.exp(-np.sum(shift * shift, axis=-1) / self.width ** 2)

    def _transverse(self, x, q):
        return complex(self.profile(x)) * self.transverse_shape(q)

    def _operator(self, grid):
        lattice = DifferenceLattice(grid)
        kernel = lattice.expand(self.transverse_shape(lattice.unique)) * (
            grid.weights[None, :] / (2.0 * math.pi) ** grid.d)

        def apply(x):
            return complex(self.profile(x)) * kernel

        return apply

    def fourier_transform(self, qx, q):
        """
        Full Fourier transform int dx d^d r exp(-i (qx x + q.r)) v, Gaussian profiles only
        """
        if not isinstance(self.profile, GaussianProfile):
            raise PotentialError("Closed form transform needs a Gaussian profile")
        return self.profile.fourier(qx) * self.transverse_shape(q)[0]

    def __repr__(self):
        return "%s(profile=%r,d=%r,width=%r,center=%r)" % (self.__class__.__name__, self.profile, self.d,
                                                           self.width, self.center.tolist())


class GaussianPotential(SeparablePotential):
    """
    v = g exp(-(x - x0)^2 / a^2) exp(-|r - r0|^2 / b^2)
    """
    kind = 'gaussian_2d_3d'

    def __init__(self, coupling, a, b, d=1, x0=0.0, r0=None):
        super().__init__(GaussianProfile(coupling, a, x0), d, b, r0)


class CircularWell(PotentialModel):
    """
    v = v0 inside the ball |(x - x0, r - r0)| < R (a disk for d=1, a sphere for d=2)
    """
    kind = 'circular_well'

    def __init__(self, depth, radius, d=1, x0=0.0, r0=None):
        super().__init__(d)
        if not radius > 0:
            raise PotentialError("Well radius must be positive, found %r" % (radius,))
        self.depth = complex(depth)
        self.radius = float(radius)
        self.x0 = float(x0)
        self.r0 = np.zeros(d) if r0 is None else np.asarray(r0, dtype=float).reshape(d)

    def support_bounds(self):
        if self.depth == 0:
            return SupportInterval(self.x0, self.x0)
        return SupportInterval(self.x0 - self.radius, self.x0 + self.radius)

    @property
    def is_real(self):
        return self.depth.imag == 0

    def radial_value(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r < self.radius, self.depth, 0.0 + 0j)

    def chord(self, x):
        return math.sqrt(max(self.radius ** 2 - (x - self.x0) ** 2, 0.0))

    def _transverse(self, x, q):
        h = self.chord(x)
        if self.d == 0:
            return np.full(len(q), self.depth)
        qn = np.linalg.norm(q, axis=-1)
        phase = np.exp(-1j * (q @ self.r0))
        if self.d == 1:
            return self.depth * 2.0 * h * np.sinc(qn * h / math.pi) * phase
        t = qn * h
        safe = np.where(t > 0, t, 1.0)
        disk = np.where(t > 1e-8, 2.0 * special.j1(safe) / safe, 1.0 - t * t / 8.0)
        return self.depth * math.pi * h * h * disk * phase

    def __repr__(self):
        return "CircularWell(depth=%r,radius=%r,d=%r,x0=%r)" % (self.depth, self.radius, self.d, self.x0)


def _trapezoid_weights(axis):
    axis = np.asarray(axis, dtype=float)
    if len(axis) == 1:
        return np.ones(1)
    gaps = np.diff(axis)
    weights = np.zeros(len(axis))
    weights[:-1] += gaps / 2.0
    weights[1:] += gaps / 2.0
    return weights


class SampledPotential(PotentialModel):
    """
    Potential sampled on a rectangular lattice: values has shape (len(xs), *map(len, axes)).

    Linear interpolation in x, trapezoid quadrature for the transverse transform.
    """
    kind = 'sampled'

    def __init__(self, xs, axes, values, source=None):
        axes = [np.asarray(a, dtype=float) for a in axes]
        super().__init__(len(axes))
        self.xs = np.asarray(xs, dtype=float)
        self.axes = axes
        self.values = np.asarray(values, dtype=complex)
        self.source = source
        expected = (len(self.xs),) + tuple(len(a) for a in axes)
        if self.values.shape != expected:
            raise PotentialError("Samples of shape %r do not fill the %r lattice" % (self.values.shape, expected))
        if len(self.xs) < 2 or np.any(np.diff(self.xs) <= 0):
            raise PotentialError("x samples must be strictly increasing with at least two points")
        for a in axes:
            if len(a) < 2 or np.any(np.diff(a) <= 0):
                raise PotentialError("Transverse samples must be strictly increasing with at least two points")
        mesh = np.meshgrid(*axes, indexing='ij') if axes else []
        self._r = np.stack([m.ravel() for m in mesh], axis=1) if axes else np.zeros((1, 0))
        weights = np.ones(1)
        for a in axes:
            weights = np.multiply.outer(weights, _trapezoid_weights(a)).ravel()
        self._w = weights
        self._flat = self.values.reshape(len(self.xs), -1)
        self.nyquist = min((math.pi / float(np.max(np.diff(a))) for a in axes), default=math.inf)
        self._check_edges()

    def _edge_ratios(self):
        """
        |v|edge/|v|max on each transverse axis
        """
        peak = np.max(np.abs(self.values)) if self.values.size else 0.0
        if peak == 0:
            return [0.0] * self.d
        return [np.max(np.abs(np.take(self.values, [0, len(a) - 1], axis=n + 1))) / peak
                for (n, a) in enumerate(self.axes)]

    def _check_edges(self):
        for (n, ratio) in enumerate(self._edge_ratios()):
            if ratio > EDGE_DECAY:
                LOGGER.warning("Sampled potential %s is not decayed at the transverse window edge "
                               "(axis %d, |v|edge/|v|max=%.3g): aliasing risk", self.source, n, ratio)

    @property
    def admissible(self):
        """
        Advisory: finite L1 norm and decay at the window edges
        """
        integral = np.sum(np.abs(self._flat) * self._w[None, :]) * float(np.ptp(self.xs))
        if not np.isfinite(integral):
            return False
        if self.d == 0:
            return True
        peak = np.max(np.abs(self.values))
        if peak == 0:
            return True
        longitudinal = max(np.abs(self.values[0]).max(), np.abs(self.values[-1]).max()) / peak
        return max([longitudinal] + self._edge_ratios()) <= EDGE_DECAY

    def support_bounds(self):
        return SupportInterval(float(self.xs[0]), float(self.xs[-1]))

    @property
    def breakpoints(self):
        return self.xs.tolist()

    @property
    def is_real(self):
        return not np.any(self.values.imag)

    def check_alias(self, q):
        q = np.asarray(q, dtype=float)
        if q.size and np.max(np.abs(q)) > self.nyquist:
            raise AliasingError("Momentum %.6g beyond the sampling Nyquist limit %.6g of %s: aliasing risk"
                                % (np.max(np.abs(q)), self.nyquist, self.source))

    def _sample_transform(self, index, q):
        phases = np.exp(-1j * (q @ self._r.T))
        return phases @ (self._w * self._flat[index])

    def _interpolate(self, x, transform):
        s = int(np.searchsorted(self.xs, x, side='right')) - 1
        s = min(max(s, 0), len(self.xs) - 2)
        t = (x - self.xs[s]) / (self.xs[s + 1] - self.xs[s])
        return (1.0 - t) * transform(s) + t * transform(s + 1)

    def _transverse(self, x, q):
        self.check_alias(q)
        return self._interpolate(x, lambda s: self._sample_transform(s, q))

    def _operator(self, grid):
        lattice = DifferenceLattice(grid)
        self.check_alias(lattice.unique)
        scale = grid.weights[None, :] / (2.0 * math.pi) ** grid.d

        @functools.lru_cache(maxsize=4)
        def kernel(s):
            return lattice.expand(self._sample_transform(s, lattice.unique)) * scale

        def apply(x):
            return self._interpolate(x, kernel)

        return apply

    @classmethod
    def from_rows(cls, rows, d, source=None):
        """
        :param rows: sequence of (x, r_1..r_d, re_v, im_v)
        """
        data = np.asarray(rows, dtype=float)
        if data.ndim != 2 or data.shape[1] != d + 3:
            raise PotentialError("Sampled rows need %d columns (x, %d coordinates, re_v, im_v)" % (d + 3, d))
        coords = [np.unique(data[:, c]) for c in range(d + 1)]
        shape = tuple(len(c) for c in coords)
        if int(np.prod(shape)) != len(data):
            raise PotentialError("Samples of %s do not form a rectangular lattice (%d rows for %r)"
                                 % (source, len(data), shape))
        values = np.zeros(shape, dtype=complex)
        index = tuple(np.searchsorted(coords[c], data[:, c]) for c in range(d + 1))
        values[index] = data[:, d + 1] + 1j * data[:, d + 2]
        return cls(coords[0], coords[1:], values, source=source)

    @classmethod
    def from_file(cls, path, d):
        """
        Load CSV (header row, columns x[,y[,z]],re_v,im_v) or JSON ({"rows": [...]} or list of rows)
        """
        content = filesystem.read_text(path)
        if content is None:
            raise PotentialError("Couldn't read sampled potential file %s" % path)
        try:
            if os.path.splitext(path)[1].lower() == '.json':
                payload = json.loads(content)
                rows = payload['rows'] if isinstance(payload, dict) else payload
                if rows and isinstance(rows[0], dict):
                    names = ['x', 'y', 'z'][:d + 1] + ['re_v', 'im_v']
                    rows = [[row[n] for n in names] for row in rows]
            else:
                reader = csv.reader(io.StringIO(content))
                next(reader)
                rows = [[float(c) for c in row] for row in reader if row]
        except (ValueError, KeyError, TypeError, StopIteration) as e:
            raise PotentialError("Malformed sampled potential file %s: %s" % (path, e))
        LOGGER.debug("Loaded %d samples from %s", len(rows), path)
        return cls.from_rows(rows, d, source=path)

    def __repr__(self):
        return "SampledPotential(source=%r,d=%r,shape=%r)" % (self.source, self.d, self.values.shape)


class SumPotential(PotentialModel):
    kind = 'sum'

    def __init__(self, terms):
        terms = list(terms)
        if not terms:
            raise PotentialError("Empty potential sum")
        super().__init__(terms[0].d)
        if any(t.d != self.d for t in terms):
            raise PotentialError("Potential sum mixes transverse dimensions")
        self.terms = terms

    def support_bounds(self):
        return _hull(t.support_bounds() for t in self.terms)

    @property
    def breakpoints(self):
        return sorted({b for t in self.terms for b in t.breakpoints})

    @property
    def is_real(self):
        return all(t.is_real for t in self.terms)

    @property
    def admissible(self):
        return all(t.admissible for t in self.terms)

    def transverse_fourier(self, x, p, cell=None):
        return sum(t.transverse_fourier(x, p, cell=cell) for t in self.terms)

    def _operator(self, grid):
        operators = [t.convolution_operator(grid) for t in self.terms]

        def apply(x):
            return sum(op(x) for op in operators)

        return apply

    def as_line(self):
        terms = [t.as_line() for t in self.terms]
        if any(t is None for t in terms):
            return None
        return SumPotential(terms)

    def fourier_transform(self, qx, q):
        return sum(t.fourier_transform(qx, q) for t in self.terms)

    def __repr__(self):
        return "SumPotential(terms=%r)" % (self.terms,)


class ScaledPotential(PotentialModel):
    """
    factor * base for a complex constant factor
    """
    def __init__(self, base, factor):
        super().__init__(base.d)
        self.base = base
        self.factor = complex(factor)
        self.kind = base.kind

    def support_bounds(self):
        return self.base.support_bounds()

    @property
    def breakpoints(self):
        return self.base.breakpoints

    @property
    def is_real(self):
        return self.base.is_real and self.factor.imag == 0

    @property
    def admissible(self):
        return self.base.admissible

    def transverse_fourier(self, x, p, cell=None):
        return self.factor * self.base.transverse_fourier(x, p, cell=cell)

    def _operator(self, grid):
        inner = self.base.convolution_operator(grid)

        def apply(x):
            return self.factor * inner(x)

        return apply

    def as_line(self):
        base = self.base.as_line()
        return None if base is None else base.scaled(self.factor)

    def fourier_transform(self, qx, q):
        return self.factor * self.base.fourier_transform(qx, q)

    def __repr__(self):
        return "ScaledPotential(base=%r,factor=%r)" % (self.base, self.factor)


def gaussian_mixture(d, n_terms=3, seed=0, coupling=0.3, spread=1.0):
    """
    Seeded sum of complex Gaussian bumps, the smooth complex test potential
    """
    rng = np.random.default_rng(seed)
    terms = []
    for _ in range(n_terms):
        magnitude = coupling * rng.uniform(0.5, 1.0)
        amplitude = magnitude * np.exp(1j * rng.uniform(-math.pi, math.pi))
        a = rng.uniform(0.5, 1.0)
        b = rng.uniform(0.5, 1.0)
        x0 = rng.uniform(-spread, spread)
        r0 = rng.uniform(-spread / 2.0, spread / 2.0, size=d)
        if d == 0:
            terms.append(XOnlyPotential(GaussianProfile(amplitude, a, x0), 0))
        else:
            terms.append(GaussianPotential(amplitude, a, b, d, x0, r0))
    return SumPotential(terms)


def transverse_fourier(v, x, p, cell=None):
    return v.transverse_fourier(x, p, cell=cell)


def support_bounds(v):
    return v.support_bounds()


def potential_from_config(conf, d, base_dir=None):
    """
    Build a potential from its config dictionary ({"kind": ..., parameters});
    an optional "scale" entry multiplies it by a complex constant
    """
    v = _build_potential(conf, d, base_dir)
    if isinstance(conf, dict) and 'scale' in conf:
        v = v.scaled(as_complex(conf['scale']))
    return v


def _build_potential(conf, d, base_dir):
    if not isinstance(conf, dict) or 'kind' not in conf:
        raise ConfigError("Potential description must be a table with a 'kind' key, found %r" % (conf,))
    kind = conf['kind']
    try:
        if kind == 'zero':
            return zero_potential(d)
        if kind == 'x_only':
            return XOnlyPotential(profile_from_config(conf), d)
        if kind == 'separable_product':
            return SeparablePotential(profile_from_config(conf), d, conf['transverse_width'],
                                      conf.get('transverse_center'))
        if kind in ('gaussian', 'gaussian_2d_3d'):
            return GaussianPotential(as_complex(conf['coupling']), conf['a'], conf['b'], d,
                                     conf.get('x0', 0.0), conf.get('r0'))
        if kind == 'gaussian_mixture':
            return gaussian_mixture(d, int(conf.get('n_terms', 3)), int(conf.get('seed', 0)),
                                    float(conf.get('coupling', 0.3)), float(conf.get('spread', 1.0)))
        if kind == 'circular_well':
            return CircularWell(as_complex(conf['depth']), conf['radius'], d,
                                conf.get('x0', 0.0), conf.get('r0'))
        if kind == 'sampled':
            path = conf['path']
            if base_dir is not None and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            if not os.path.exists(path):
                raise ConfigError("Sampled potential file %s not found" % path)
            return SampledPotential.from_file(path, d)
        if kind == 'sum':
            return SumPotential(potential_from_config(t, d, base_dir) for t in conf['terms'])
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError("Invalid %s potential description: %s" % (kind, e))
    raise ConfigError("Unknown potential kind '%s'" % kind)

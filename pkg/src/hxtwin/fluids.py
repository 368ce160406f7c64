"""Specific-enthalpy models and mean-specific-heat evaluation.

Three interchangeable fluid models provide h(T, p) in J/kg:

* ``CaloricallyPerfect``: constant cp, h = cp * T.
* ``ThermallyPerfect``: cp depends on temperature only, given either as
  polynomial coefficients in T or as a 1-D cp(T) table; h is the exact
  integral of cp.
* ``Tabulated``: bilinear interpolation of h on a rectangular (T, p)
  grid, loaded from a plain-text table file.

All temperatures are absolute kelvin, pressures Pa, enthalpies J/kg.
Models are immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "OutOfRangeError",
    "ParseError",
    "NonMonotonicAxisError",
    "FluidModel",
    "CaloricallyPerfect",
    "ThermallyPerfect",
    "Tabulated",
    "StreamConfig",
    "enthalpy",
    "mean_specific_heat",
    "load_fluid_table",
    "save_fluid_table",
]

# Degenerate-secant threshold and the centered finite-difference half step
# used for the point specific heat.
_SECANT_EPS = 1e-6  # K
_POINT_CP_STEP = 0.01  # K

_TABLE_HEADER = ("T/K", "p/Pa", "h/(J/kg)")


class OutOfRangeError(ValueError):
    """Query outside a fluid model's validity hull."""


class ParseError(ValueError):
    """Malformed fluid-table file; message carries the line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NonMonotonicAxisError(ValueError):
    """Table axis not strictly increasing; message carries axis and index."""

    def __init__(self, axis: str, index: int):
        super().__init__(
            f"axis '{axis}' must be strictly increasing, violated at position {index}"
        )
        self.axis = axis
        self.index = index


class FluidModel:
    """Base class for enthalpy providers.

    Subclasses implement ``enthalpy(T, p)`` and expose ``hull_T`` and
    ``hull_p`` as (min, max) tuples used for range validation.
    """

    hull_T: tuple[float, float] = (-math.inf, math.inf)
    hull_p: tuple[float, float] = (-math.inf, math.inf)

    def enthalpy(self, T: float, p: float) -> float:
        raise NotImplementedError

    def _check_hull(self, T: float, p: float) -> None:
        if not self.hull_T[0] <= T <= self.hull_T[1]:
            raise OutOfRangeError(
                f"T={T} K outside model hull [{self.hull_T[0]}, {self.hull_T[1]}] K"
            )
        if not self.hull_p[0] <= p <= self.hull_p[1]:
            raise OutOfRangeError(
                f"p={p} Pa outside model hull [{self.hull_p[0]}, {self.hull_p[1]}] Pa"
            )

    def mean_specific_heat(self, T_from: float, T_to: float, p: float) -> float:
        """Secant (h(T_to) - h(T_from)) / (T_to - T_from), or the point cp
        when the interval degenerates below 1e-6 K."""
        if abs(T_to - T_from) < _SECANT_EPS:
            return self._point_cp(0.5 * (T_from + T_to), p)
        return (self.enthalpy(T_to, p) - self.enthalpy(T_from, p)) / (T_to - T_from)

    def _point_cp(self, T: float, p: float) -> float:
        # Centered difference with 0.01 K half-width; the stencil is shifted
        # inward when T sits on a hull edge so both samples stay valid.
        lo, hi = T - _POINT_CP_STEP, T + _POINT_CP_STEP
        t_min, t_max = self.hull_T
        if lo < t_min:
            hi += t_min - lo
            lo = t_min
        elif hi > t_max:
            lo -= hi - t_max
            hi = t_max
        if lo < t_min or hi <= lo:
            raise OutOfRangeError(f"hull too narrow for point cp stencil at T={T} K")
        return (self.enthalpy(hi, p) - self.enthalpy(lo, p)) / (hi - lo)


class CaloricallyPerfect(FluidModel):
    """Constant specific heat: h(T, p) = cp * T."""

    def __init__(self, cp: float):
        if cp <= 0.0:
            raise ValueError(f"cp must be positive, got {cp}")
        self.cp = float(cp)

    def enthalpy(self, T: float, p: float) -> float:
        return self.cp * T

    def mean_specific_heat(self, T_from: float, T_to: float, p: float) -> float:
        return self.cp

    def _point_cp(self, T: float, p: float) -> float:
        return self.cp

    def __repr__(self):
        return f"CaloricallyPerfect(cp={self.cp!r})"


class ThermallyPerfect(FluidModel):
    """Temperature-dependent specific heat, pressure-independent enthalpy.

    Exactly one of ``cp_coeffs`` (polynomial in T, ascending powers,
    J/(kg K)) or ``cp_table`` ((T_grid, cp_grid) with piecewise-linear
    interpolation) must be given.  Enthalpy is the analytic integral of
    cp with h = 0 at the lower hull edge (offsets cancel in all uses).
    """

    def __init__(
        self,
        cp_coeffs: Sequence[float] | None = None,
        cp_table: tuple[Sequence[float], Sequence[float]] | None = None,
        hull_T: tuple[float, float] = (150.0, 1500.0),
    ):
        if (cp_coeffs is None) == (cp_table is None):
            raise ValueError("give exactly one of cp_coeffs or cp_table")
        self.hull_T = (float(hull_T[0]), float(hull_T[1]))
        if cp_coeffs is not None:
            self._coeffs = [float(c) for c in cp_coeffs]
            # Antiderivative coefficients for Horner evaluation of h(T).
            self._int_coeffs = [c / (i + 1) for i, c in enumerate(self._coeffs)]
            self._tgrid = None
            for T in _sample_grid(*self.hull_T, 64):
                if self._cp_poly(T) <= 0.0:
                    raise ValueError(f"cp polynomial nonpositive at T={T:.2f} K")
        else:
            tg, cg = cp_table
            self._tgrid = [float(v) for v in tg]
            self._cpgrid = [float(v) for v in cg]
            if len(self._tgrid) != len(self._cpgrid) or len(self._tgrid) < 2:
                raise ValueError("cp_table needs matching T and cp arrays, length >= 2")
            for i in range(1, len(self._tgrid)):
                if self._tgrid[i] <= self._tgrid[i - 1]:
                    raise NonMonotonicAxisError("T", i)
            if min(self._cpgrid) <= 0.0:
                raise ValueError("cp table values must be positive")
            self.hull_T = (self._tgrid[0], self._tgrid[-1])
            # Cumulative integral of the piecewise-linear cp at the nodes.
            cum = [0.0]
            for i in range(1, len(self._tgrid)):
                dT = self._tgrid[i] - self._tgrid[i - 1]
                cum.append(cum[-1] + 0.5 * (self._cpgrid[i] + self._cpgrid[i - 1]) * dT)
            self._cum = cum

    def _cp_poly(self, T: float) -> float:
        acc = 0.0
        for c in reversed(self._coeffs):
            acc = acc * T + c
        return acc

    def enthalpy(self, T: float, p: float) -> float:
        self._check_hull(T, p)
        if self._tgrid is None:
            acc = 0.0
            for c in reversed(self._int_coeffs):
                acc = acc * T + c
            ref = 0.0
            T0 = self.hull_T[0]
            for c in reversed(self._int_coeffs):
                ref = ref * T0 + c
            return acc * T - ref * T0
        i = bisect_right(self._tgrid, T) - 1
        i = min(max(i, 0), len(self._tgrid) - 2)
        dT = T - self._tgrid[i]
        slope = (self._cpgrid[i + 1] - self._cpgrid[i]) / (
            self._tgrid[i + 1] - self._tgrid[i]
        )
        return self._cum[i] + self._cpgrid[i] * dT + 0.5 * slope * dT * dT

    def __repr__(self):
        kind = "poly" if self._tgrid is None else "table"
        return f"ThermallyPerfect({kind}, hull_T={self.hull_T})"


class Tabulated(FluidModel):
    """Bilinear interpolation of h on a rectangular (T, p) grid.

    Axes must be strictly increasing and every grid column must be
    strictly increasing in T (positive heat capacity).  Queries outside
    the grid hull raise OutOfRangeError.
    """

    def __init__(
        self,
        T_grid: Sequence[float],
        p_grid: Sequence[float],
        h_grid: Sequence[Sequence[float]],
    ):
        self._T = [float(v) for v in T_grid]
        self._p = [float(v) for v in p_grid]
        if len(self._T) < 2:
            raise ValueError("T axis needs at least 2 points")
        if len(self._p) < 2:
            raise ValueError("p axis needs at least 2 points")
        for i in range(1, len(self._T)):
            if self._T[i] <= self._T[i - 1]:
                raise NonMonotonicAxisError("T", i)
        for j in range(1, len(self._p)):
            if self._p[j] <= self._p[j - 1]:
                raise NonMonotonicAxisError("p", j)
        self._h = [[float(v) for v in row] for row in h_grid]
        if len(self._h) != len(self._T) or any(len(r) != len(self._p) for r in self._h):
            raise ValueError("h grid shape must be (len(T), len(p))")
        for j in range(len(self._p)):
            for i in range(1, len(self._T)):
                if self._h[i][j] <= self._h[i - 1][j]:
                    raise ValueError(
                        f"enthalpy must increase with T; violated at T index {i}, "
                        f"p index {j}"
                    )
        self.hull_T = (self._T[0], self._T[-1])
        self.hull_p = (self._p[0], self._p[-1])

    @property
    def T_grid(self):
        return tuple(self._T)

    @property
    def p_grid(self):
        return tuple(self._p)

    @property
    def h_grid(self):
        return tuple(tuple(r) for r in self._h)

    def enthalpy(self, T: float, p: float) -> float:
        Tg, pg = self._T, self._p
        if not Tg[0] <= T <= Tg[-1]:
            raise OutOfRangeError(f"T={T} K outside table hull [{Tg[0]}, {Tg[-1]}] K")
        if not pg[0] <= p <= pg[-1]:
            raise OutOfRangeError(f"p={p} Pa outside table hull [{pg[0]}, {pg[-1]}] Pa")
        i = bisect_right(Tg, T) - 1
        if i > len(Tg) - 2:
            i = len(Tg) - 2
        j = bisect_right(pg, p) - 1
        if j > len(pg) - 2:
            j = len(pg) - 2
        tt = (T - Tg[i]) / (Tg[i + 1] - Tg[i])
        pp = (p - pg[j]) / (pg[j + 1] - pg[j])
        row0, row1 = self._h[i], self._h[i + 1]
        h00, h01 = row0[j], row0[j + 1]
        h10, h11 = row1[j], row1[j + 1]
        return (
            (1.0 - tt) * ((1.0 - pp) * h00 + pp * h01)
            + tt * ((1.0 - pp) * h10 + pp * h11)
        )

    def __repr__(self):
        return (
            f"Tabulated({len(self._T)}x{len(self._p)} grid, "
            f"T in {self.hull_T}, p in {self.hull_p})"
        )


@dataclass(frozen=True)
class StreamConfig:
    """A fluid model together with its fixed stream pressure."""

    fluid: FluidModel
    pressure: float  # Pa

    def __post_init__(self):
        if self.pressure <= 0.0:
            raise ValueError(f"pressure must be positive, got {self.pressure}")


def enthalpy(model: FluidModel, T: float, p: float) -> float:
    """Specific enthalpy h(T, p) in J/kg."""
    return model.enthalpy(T, p)


def mean_specific_heat(model: FluidModel, T_from: float, T_to: float, p: float) -> float:
    """Mean specific heat over [T_from, T_to] at pressure p.

    Returns the enthalpy secant (h(T_to) - h(T_from)) / (T_to - T_from);
    for |T_to - T_from| < 1e-6 K it falls back to a centered
    finite-difference point cp with a 0.01 K step.
    """
    return model.mean_specific_heat(T_from, T_to, p)


def _sample_grid(lo: float, hi: float, n: int):
    step = (hi - lo) / (n - 1)
    return [lo + k * step for k in range(n)]


# ---------------------------------------------------------------------------
# Table file format
#
#   # comments and blank lines are ignored; '#' starts an inline comment
#   T/K p/Pa h/(J/kg)          header, exact tokens
#   T: 280 300 320             T axis, strictly increasing
#   p: 1e6 2e6                 p axis, strictly increasing
#   <len(T)*len(p) lines>      one h value per line, row-major (T outer)
# ---------------------------------------------------------------------------


def _content_lines(source):
    """Yield (line_number, content) pairs with comments and blanks removed."""
    if hasattr(source, "read"):
        raw = source.read().splitlines()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            raw = fh.read().splitlines()
    for n, line in enumerate(raw, start=1):
        content = line.split("#", 1)[0].strip()
        if content:
            yield n, content


def _parse_floats(tokens, line_no):
    out = []
    for tok in tokens:
        try:
            out.append(float(tok))
        except ValueError:
            raise ParseError(f"expected a number, got {tok!r}", line_no) from None
    return out


def load_fluid_table(source) -> Tabulated:
    """Load a Tabulated fluid model from a table file (path or file-like).

    Raises ParseError (with line number) on malformed content and
    NonMonotonicAxisError when an axis is not strictly increasing.
    """
    lines = _content_lines(source)
    last_line = 0
    try:
        line_no, header = next(lines)
    except StopIteration:
        raise ParseError("empty table file", 1) from None
    if tuple(header.split()) != _TABLE_HEADER:
        raise ParseError(
            f"header must be {' '.join(_TABLE_HEADER)!r}, got {header!r}", line_no
        )

    axes: dict[str, list[float]] = {}
    for name in ("T", "p"):
        try:
            line_no, content = next(lines)
        except StopIteration:
            raise ParseError(f"missing '{name}:' axis line", line_no) from None
        if not content.startswith(name + ":"):
            raise ParseError(f"expected '{name}:' axis line, got {content!r}", line_no)
        vals = _parse_floats(content[len(name) + 1 :].split(), line_no)
        if len(vals) < 2:
            raise ParseError(f"axis '{name}' needs at least 2 values", line_no)
        for i in range(1, len(vals)):
            if vals[i] <= vals[i - 1]:
                raise NonMonotonicAxisError(name, i)
        axes[name] = vals
        last_line = line_no

    n_T, n_p = len(axes["T"]), len(axes["p"])
    values = []
    for line_no, content in lines:
        toks = content.split()
        if len(toks) != 1:
            raise ParseError(
                f"expected one h value per line, got {len(toks)} tokens", line_no
            )
        values.extend(_parse_floats(toks, line_no))
        last_line = line_no
        if len(values) > n_T * n_p:
            raise ParseError(
                f"too many grid cells: expected {n_T * n_p}", line_no
            )
    if len(values) != n_T * n_p:
        raise ParseError(
            f"missing grid cells: expected {n_T * n_p}, got {len(values)}",
            last_line + 1,
        )
    h_grid = [values[i * n_p : (i + 1) * n_p] for i in range(n_T)]
    return Tabulated(axes["T"], axes["p"], h_grid)


def save_fluid_table(model: Tabulated, path) -> None:
    """Write a Tabulated model in the table file format (round-trip safe)."""
    lines = [" ".join(_TABLE_HEADER)]
    lines.append("T: " + " ".join(repr(v) for v in model.T_grid))
    lines.append("p: " + " ".join(repr(v) for v in model.p_grid))
    for row in model.h_grid:
        for v in row:
            lines.append(repr(v))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

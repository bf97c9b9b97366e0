"""Thermodynamic contact space: fundamental relations and Legendre submanifolds.

The five-variable chart (U, V, S, T, P) maps to Darboux coordinates as
u = S, q = (U, V), p = (beta, -Ptilde) with beta = 1/T and Ptilde = P/T,
so the first law dS - beta dU + Ptilde dV = 0 is the contact condition and
a fundamental relation S(U, V) presents the equilibrium states of a
substance as a Legendre submanifold graph.

With this chart convention the on-shell differential of the energy is
dU = T dS + P dV, and the potential pictures follow:

    "U"     potential U        base (S, V)   d U      =  T dS + P dV
    "U-PV"  potential U - PV   base (S, P)   d[U-PV]  =  T dS - V dP
    "U+TS"  potential U - TS   base (V, T)   d[U-TS]  =  P dV - S dT

The "U+TS" label is kept for compatibility with the source convention; the
stored potential is U - TS, the unique choice whose first-law residual
vanishes on the submanifold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characteristics import ContactPoint
from .errors import (
    ConjugatePair,
    DomainError,
    NonInvertibleChart,
    NonPositiveInput,
)

_CONJUGATE_PAIRS = ({"S", "T"}, {"V", "P"}, {"U", "T"})


@dataclass(frozen=True)
class ThermoState:
    """Equilibrium 5-tuple with the gas parameter that produced it."""

    U: float
    V: float
    S: float
    T: float
    P: float
    nR: float = 1.0

    @property
    def beta(self):
        return 1.0 / self.T

    @property
    def p_tilde(self):
        return self.P / self.T

    def to_darboux(self):
        """Contact point (u, q, p) = (S, (U, V), (beta, -Ptilde))."""
        return ContactPoint(self.S, [self.U, self.V], [self.beta, -self.p_tilde])


class FundamentalRelation:
    """Entropy S(U, V) with exact partial derivatives.

    Evaluators must accept numpy arrays.  ``domain`` is a predicate used to
    reject grids outside the physical region.
    """

    def __init__(self, S, S_U, S_V, domain=None, name="custom"):
        self.S = S
        self.S_U = S_U
        self.S_V = S_V
        self.domain = domain or (lambda U, V: np.ones(np.shape(U), dtype=bool))
        self.name = name

    @classmethod
    def ideal_gas(cls, nR=1.0):
        """S = nR log(U^(3/2) / V), entropy constant fixed to zero."""
        return cls(
            S=lambda U, V: nR * (1.5 * np.log(U) - np.log(V)),
            S_U=lambda U, V: 1.5 * nR / U,
            S_V=lambda U, V: -nR / V,
            domain=lambda U, V: (np.asarray(U) > 0) & (np.asarray(V) > 0),
            name="ideal-gas",
        )

    @classmethod
    def covolume_gas(cls, nR=1.0, b=0.1):
        """Excluded-volume variant S = nR log(U^(3/2) (V - b))."""
        return cls(
            S=lambda U, V: nR * (1.5 * np.log(U) + np.log(V - b)),
            S_U=lambda U, V: 1.5 * nR / U,
            S_V=lambda U, V: nR / (V - b),
            domain=lambda U, V: (np.asarray(U) > 0) & (np.asarray(V) > b),
            name="covolume-gas",
        )

    @classmethod
    def constant(cls, value=0.0):
        """Degenerate relation with S identically constant."""
        return cls(
            S=lambda U, V: np.full(np.shape(U), float(value)) if np.shape(U) else float(value),
            S_U=lambda U, V: np.zeros(np.shape(U)) if np.shape(U) else 0.0,
            S_V=lambda U, V: np.zeros(np.shape(U)) if np.shape(U) else 0.0,
            name="constant",
        )

    def check_partials(self, points, tol=1e-8, h=1e-5):
        """Finite-difference consistency of (S_U, S_V) with S."""
        worst = 0.0
        for U, V in points:
            fd_u = (self.S(U + h, V) - self.S(U - h, V)) / (2 * h)
            fd_v = (self.S(U, V + h) - self.S(U, V - h)) / (2 * h)
            scale = max(1.0, abs(self.S_U(U, V)), abs(self.S_V(U, V)))
            worst = max(
                worst,
                abs(fd_u - self.S_U(U, V)) / scale,
                abs(fd_v - self.S_V(U, V)) / scale,
            )
        return worst <= tol, worst


def ideal_gas(nR, U, V):
    """Monatomic ideal-gas state from the printed fundamental relation.

    S = nR log(U^(3/2)/V),  1/T = 3nR/2U,  P/T = nR/V.
    """
    if nR <= 0 or U <= 0 or V <= 0:
        raise NonPositiveInput(f"nR, U, V must be positive (got {nR}, {U}, {V})")
    S = nR * math.log(U ** 1.5 / V)
    T = 2.0 * U / (3.0 * nR)
    P = nR * T / V
    return ThermoState(U=U, V=V, S=S, T=T, P=P, nR=nR)


# Picture table: label -> (potential, base pair, signed conjugates).
# Values are functions of the sampled (U, V, S, T, P) arrays.
_PICTURES = {
    "S": {
        "potential": lambda d: d["S"],
        "base": ("U", "V"),
        "conjugates": lambda d: (1.0 / d["T"], -(d["P"] / d["T"])),
    },
    "U": {
        "potential": lambda d: d["U"],
        "base": ("S", "V"),
        "conjugates": lambda d: (d["T"], d["P"]),
    },
    "U-PV": {
        "potential": lambda d: d["U"] - d["P"] * d["V"],
        "base": ("S", "P"),
        "conjugates": lambda d: (d["T"], -d["V"]),
    },
    "U+TS": {
        "potential": lambda d: d["U"] - d["T"] * d["S"],
        "base": ("V", "T"),
        "conjugates": lambda d: (d["P"], -d["S"]),
    },
}

_BASE_TO_PICTURE = {frozenset(info["base"]): label for label, info in _PICTURES.items()}


class LegendreMap:
    """Sampled Legendre submanifold carried on the original (U, V) grid.

    All five coordinates are stored per sample, so switching pictures is a
    relabelling of roles plus potential arithmetic; the grid topology is
    reused for the discrete first-law residual in any picture.
    """

    def __init__(self, U, V, S, beta, p_tilde, picture="S"):
        self.U = np.asarray(U, dtype=float)
        self.V = np.asarray(V, dtype=float)
        self.S = np.asarray(S, dtype=float)
        self.beta = np.asarray(beta, dtype=float)
        self.p_tilde = np.asarray(p_tilde, dtype=float)
        self.picture = picture

    @property
    def T(self):
        with np.errstate(divide="ignore"):
            return 1.0 / self.beta

    @property
    def P(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.p_tilde / self.beta

    def _fields(self):
        return {"U": self.U, "V": self.V, "S": self.S, "T": self.T, "P": self.P}

    def first_law_residual(self):
        """Max normalized edge defect of d(potential) = y1 dx1 + y2 dx2.

        For picture "S" the conjugates (beta, -Ptilde) are used directly so
        degenerate relations (T undefined) still evaluate.
        """
        if self.picture == "S":
            phi = self.S
            x1, x2 = self.U, self.V
            y1, y2 = self.beta, -self.p_tilde
        else:
            info = _PICTURES[self.picture]
            d = self._fields()
            phi = info["potential"](d)
            x1, x2 = (d[name] for name in info["base"])
            y1, y2 = info["conjugates"](d)
        worst = 0.0
        for axis in (0, 1):
            dphi = np.diff(phi, axis=axis)
            dx1 = np.diff(x1, axis=axis)
            dx2 = np.diff(x2, axis=axis)
            y1b = _edge_mean(y1, axis)
            y2b = _edge_mean(y2, axis)
            defect = np.abs(dphi - y1b * dx1 - y2b * dx2)
            scale = np.abs(dphi) + np.abs(y1b * dx1) + np.abs(y2b * dx2)
            # Individual edges may sit at accidental cancellations of the
            # pullback terms; floor the local scale by the RMS edge scale.
            floor = float(np.sqrt(np.mean(scale**2)))
            scale = np.maximum(scale, floor)
            scale = np.maximum(scale, 1e-300)
            normalized = np.where(defect == 0.0, 0.0, defect / scale)
            worst = max(worst, float(np.max(normalized)))
        return worst

    def maxwell_defect(self):
        """Integrability check d(beta)/dV + d(Ptilde)/dU ~ 0 on the grid."""
        dbeta_dV = _central(self.beta, self.V, axis=1)[1:-1, :]
        dptilde_dU = _central(self.p_tilde, self.U, axis=0)[:, 1:-1]
        defect = np.abs(dbeta_dV + dptilde_dU)
        scale = np.maximum(np.abs(dbeta_dV) + np.abs(dptilde_dU), 1.0)
        return float(np.max(defect / scale))

    def states(self, nR=1.0):
        """Flat iterator of ThermoState rows (row-major over the grid)."""
        T, P = self.T, self.P
        for idx in np.ndindex(self.U.shape):
            yield ThermoState(
                U=float(self.U[idx]),
                V=float(self.V[idx]),
                S=float(self.S[idx]),
                T=float(T[idx]),
                P=float(P[idx]),
                nR=nR,
            )


def _edge_mean(arr, axis):
    if axis == 0:
        return 0.5 * (arr[1:, :] + arr[:-1, :])
    return 0.5 * (arr[:, 1:] + arr[:, :-1])


def _central(values, coords, axis):
    sliced = lambda lo, hi: tuple(
        slice(lo, hi) if ax == axis else slice(None) for ax in range(values.ndim)
    )
    num = values[sliced(2, None)] - values[sliced(None, -2)]
    den = coords[sliced(2, None)] - coords[sliced(None, -2)]
    return num / den


def legendre_submanifold(relation, U_grid, V_grid):
    """Sample a fundamental relation on a rectangular (U, V) grid."""
    U_grid = np.asarray(U_grid, dtype=float)
    V_grid = np.asarray(V_grid, dtype=float)
    U, V = np.meshgrid(U_grid, V_grid, indexing="ij")
    if not np.all(relation.domain(U, V)):
        raise DomainError(f"grid leaves the domain of relation {relation.name!r}")
    S = relation.S(U, V)
    beta = relation.S_U(U, V)
    p_tilde = -relation.S_V(U, V)
    if not (np.all(np.isfinite(S)) and np.all(np.isfinite(beta)) and np.all(np.isfinite(p_tilde))):
        raise DomainError("fundamental relation produced non-finite samples")
    return LegendreMap(U, V, np.broadcast_to(S, U.shape), beta, p_tilde)


def switch_potential(samples, picture=None, base=None):
    """Re-express a Legendre submanifold in another potential picture.

    Exactly one of ``picture`` (a label from "S", "U", "U-PV", "U+TS") or
    ``base`` (a pair of coordinate names) must be given.  Conjugate base
    pairs are rejected, as are pictures whose base map folds over on the
    sampled patch.
    """
    if (picture is None) == (base is None):
        raise ValueError("specify exactly one of picture or base")
    if base is not None:
        pair = frozenset(base)
        if pair in map(frozenset, _CONJUGATE_PAIRS):
            raise ConjugatePair(f"base coordinates {tuple(base)} are conjugate")
        picture = _BASE_TO_PICTURE.get(pair)
        if picture is None:
            raise DomainError(f"no supported picture has base {tuple(base)}")
    if picture not in _PICTURES:
        raise DomainError(f"unknown picture {picture!r}")
    info = _PICTURES[picture]
    if picture != "S":
        _check_invertible(samples, info["base"])
    return LegendreMap(
        samples.U, samples.V, samples.S, samples.beta, samples.p_tilde, picture=picture
    )


def _check_invertible(samples, base_names):
    d = samples._fields()
    x1, x2 = d[base_names[0]], d[base_names[1]]
    if x1.shape[0] < 3 or x1.shape[1] < 3:
        return
    jac = (
        _central(x1, samples.U, 0)[:, 1:-1] * _central(x2, samples.V, 1)[1:-1, :]
        - _central(x1, samples.V, 1)[1:-1, :] * _central(x2, samples.U, 0)[:, 1:-1]
    )
    scale = float(np.median(np.abs(jac))) if jac.size else 0.0
    if not np.all(np.isfinite(jac)) or np.min(np.abs(jac)) <= 1e-12 * max(scale, 1e-12):
        raise NonInvertibleChart(
            f"base {base_names} is not injective on the sampled patch"
        )
    if np.max(jac) > 0 and np.min(jac) < 0:
        raise NonInvertibleChart(f"base {base_names} folds over on the patch")

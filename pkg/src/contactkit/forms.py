"""Exterior algebra with Symbol coefficients.

Forms live over the same ordered variable registry as their coefficients:
basis one-forms are d<var> for each registered variable.  Index tuples are
kept strictly increasing, so antisymmetry is normalized away at
construction time and equality is dictionary equality.
"""

from __future__ import annotations

from .errors import RegistryMismatch
from .symbols import Symbol


def _merge_sign(left, right):
    """Sign of sorting the concatenation of two increasing index tuples.

    Returns (sign, merged) with sign 0 when an index repeats.
    """
    merged = []
    sign = 1
    i = j = 0
    while i < len(left) and j < len(right):
        a, b = left[i], right[j]
        if a == b:
            return 0, ()
        if a < b:
            merged.append(a)
            i += 1
        else:
            # b jumps over the remaining entries of left
            if (len(left) - i) % 2:
                sign = -sign
            merged.append(b)
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return sign, tuple(merged)


class DifferentialForm:
    """Homogeneous exterior form with exact polynomial coefficients."""

    __slots__ = ("vars", "degree", "terms")

    def __init__(self, vars, degree, terms):
        self.vars = tuple(vars)
        self.degree = degree
        clean = {}
        for idx, coeff in terms.items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index tuple {idx} has wrong length for degree {degree}")
            if any(idx[i] >= idx[i + 1] for i in range(len(idx) - 1)):
                raise ValueError(f"index tuple {idx} is not strictly increasing")
            if coeff.vars != self.vars:
                raise RegistryMismatch("coefficient registry differs from form registry")
            if coeff.is_zero:
                continue
            clean[idx] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, vars, degree=0):
        return cls(vars, degree, {})

    @classmethod
    def from_symbol(cls, coeff):
        return cls(coeff.vars, 0, {(): coeff})

    @classmethod
    def one_form(cls, vars, coeffs):
        """Build sum(coeffs[name] * d<name>) from a {name: Symbol} map."""
        vars = tuple(vars)
        terms = {}
        for name, coeff in coeffs.items():
            terms[(vars.index(name),)] = coeff
        return cls(vars, 1, terms)

    @classmethod
    def basis(cls, vars, name):
        vars = tuple(vars)
        return cls(vars, 1, {(vars.index(name),): Symbol.constant(vars, 1)})

    # -- structure -----------------------------------------------------------

    @property
    def is_zero(self):
        return not self.terms

    def scalar(self):
        """Coefficient of a degree-0 form as a Symbol."""
        if self.degree != 0:
            raise ValueError("not a degree-0 form")
        return self.terms.get((), Symbol.zero(self.vars))

    def coefficient(self, names):
        """Coefficient Symbol of d<n1>^...^d<nk> for increasing names."""
        idx = tuple(self.vars.index(n) for n in names)
        return self.terms.get(idx, Symbol.zero(self.vars))

    def _check(self, other):
        if self.vars != other.vars:
            raise RegistryMismatch("forms over different registries")

    # -- linear algebra -------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        terms = dict(self.terms)
        for idx, coeff in other.terms.items():
            merged = terms.get(idx, Symbol.zero(self.vars)) + coeff
            if merged.is_zero:
                terms.pop(idx, None)
            else:
                terms[idx] = merged
        return DifferentialForm(self.vars, self.degree, terms)

    def __neg__(self):
        return DifferentialForm(
            self.vars, self.degree, {i: -c for i, c in self.terms.items()}
        )

    def __sub__(self, other):
        self._check(other)
        if other.is_zero:
            return self
        return self + (-other)

    def scale(self, coeff):
        """Multiply by a Symbol (or scalar) function."""
        if not isinstance(coeff, Symbol):
            coeff = Symbol.constant(self.vars, coeff)
        return DifferentialForm(
            self.vars, self.degree, {i: coeff * c for i, c in self.terms.items()}
        )

    # -- exterior calculus -----------------------------------------------------

    def wedge(self, other):
        self._check(other)
        out = {}
        zero = Symbol.zero(self.vars)
        for ia, ca in self.terms.items():
            for ib, cb in other.terms.items():
                sign, merged = _merge_sign(ia, ib)
                if sign == 0:
                    continue
                coeff = ca * cb
                if sign < 0:
                    coeff = -coeff
                acc = out.get(merged, zero) + coeff
                if acc.is_zero:
                    out.pop(merged, None)
                else:
                    out[merged] = acc
        return DifferentialForm(self.vars, self.degree + other.degree, out)

    def d(self):
        """Exterior derivative; d(d(anything)) == 0 exactly."""
        out = {}
        zero = Symbol.zero(self.vars)
        for idx, coeff in self.terms.items():
            for j, name in enumerate(self.vars):
                dc = coeff.differentiate(name)
                if dc.is_zero:
                    continue
                sign, merged = _merge_sign((j,), idx)
                if sign == 0:
                    continue
                if sign < 0:
                    dc = -dc
                acc = out.get(merged, zero) + dc
                if acc.is_zero:
                    out.pop(merged, None)
                else:
                    out[merged] = acc
        return DifferentialForm(self.vars, self.degree + 1, out)

    def interior(self, components):
        """Interior product with a vector field given as {name: Symbol}."""
        if self.degree == 0:
            return DifferentialForm.zero(self.vars, 0)
        comp = [None] * len(self.vars)
        for name, value in components.items():
            if name not in self.vars:
                raise RegistryMismatch(f"component variable {name!r} not registered")
            if value.vars != self.vars:
                raise RegistryMismatch("component registry differs from form registry")
            comp[self.vars.index(name)] = value
        out = {}
        zero = Symbol.zero(self.vars)
        for idx, coeff in self.terms.items():
            for m, slot in enumerate(idx):
                v = comp[slot]
                if v is None or v.is_zero:
                    continue
                rest = idx[:m] + idx[m + 1:]
                term = coeff * v
                if m % 2:
                    term = -term
                acc = out.get(rest, zero) + term
                if acc.is_zero:
                    out.pop(rest, None)
                else:
                    out[rest] = acc
        return DifferentialForm(self.vars, self.degree - 1, out)

    def lie(self, components):
        """Lie derivative along a vector field via the Cartan formula."""
        return self.d().interior(components) + self.interior(components).d()

    # -- presentation -----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        if self.vars != other.vars:
            return False
        if self.is_zero and other.is_zero:
            return True
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, self.degree, tuple(sorted(self.terms))))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for idx in sorted(self.terms):
            coeff = self.terms[idx]
            basis = "^".join(f"d{self.vars[i]}" for i in idx)
            text = str(coeff)
            if " " in text or text.startswith("-") and idx:
                text = f"({text})"
            parts.append(f"{text}*{basis}" if idx else text)
        return " + ".join(parts)

    def __repr__(self):
        return f"DifferentialForm(degree={self.degree}, {self})"

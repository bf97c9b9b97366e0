"""Exact multivariate (Laurent in w) polynomials over the Gaussian rationals.

A Symbol is the common currency of the package: contact hamiltonians,
bracket values, star products and differential-form coefficients are all
Symbols.  Coefficients are a + b*i with exact rational a, b, so every
algebraic identity in the test suite is an equality of dictionaries, not a
tolerance check.  The single variable named ``w`` is allowed negative
exponents; every other exponent must be >= 0.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NegativeExponent, RegistryMismatch, UnknownVariable

LAURENT_VAR = "w"
HBAR = "hbar"


class GaussianRational:
    """Exact complex rational a + b*i.

    >>> GaussianRational(1, 2) * GaussianRational(0, 1)
    GaussianRational(-2, 1)
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @classmethod
    def coerce(cls, value):
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, float):
            return cls(Fraction(value))
        raise TypeError(f"cannot coerce {value!r} to GaussianRational")

    @property
    def is_zero(self):
        return not self.re and not self.im

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) + (-self)

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        norm = other.re * other.re + other.im * other.im
        if not norm:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("exponent must be int")
        if n < 0:
            return GaussianRational(1) / (self ** (-n))
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, complex, float, GaussianRational)):
            other = GaussianRational.coerce(other)
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        imag = "i" if mag == 1 else f"{mag}*i"
        return f"({self.re}{sign}{imag})"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)
GR_MINUS_I = GaussianRational(0, -1)


class Symbol:
    """Canonical multivariate polynomial over an ordered variable registry.

    Monomials are stored as a map from exponent tuple (one slot per
    registered variable) to nonzero GaussianRational coefficient.  Values
    are immutable by convention: every operation returns a fresh Symbol.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms):
        self.vars = tuple(vars)
        clean = {}
        nvars = len(self.vars)
        for exps, coeff in terms.items():
            coeff = GaussianRational.coerce(coeff)
            if coeff.is_zero:
                continue
            exps = tuple(exps)
            if len(exps) != nvars:
                raise RegistryMismatch(
                    f"exponent tuple {exps} does not match registry {self.vars}"
                )
            for name, e in zip(self.vars, exps):
                if e < 0 and name != LAURENT_VAR:
                    raise NegativeExponent(
                        f"variable {name!r} may not carry negative exponent {e}"
                    )
            if exps in clean:
                merged = clean[exps] + coeff
                if merged.is_zero:
                    del clean[exps]
                else:
                    clean[exps] = merged
            else:
                clean[exps] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, vars):
        return cls(vars, {})

    @classmethod
    def constant(cls, vars, value):
        return cls(vars, {(0,) * len(vars): GaussianRational.coerce(value)})

    @classmethod
    def variable(cls, vars, name):
        vars = tuple(vars)
        if name not in vars:
            raise UnknownVariable(f"variable {name!r} not in registry {vars}")
        exps = [0] * len(vars)
        exps[vars.index(name)] = 1
        return cls(vars, {tuple(exps): GR_ONE})

    @classmethod
    def monomial(cls, vars, powers, coeff=1):
        """Build coeff * prod(var**power) from a {name: power} map."""
        vars = tuple(vars)
        exps = [0] * len(vars)
        for name, power in powers.items():
            if name not in vars:
                raise UnknownVariable(f"variable {name!r} not in registry {vars}")
            exps[vars.index(name)] = power
        return cls(vars, {tuple(exps): GaussianRational.coerce(coeff)})

    # -- predicates ---------------------------------------------------------

    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_constant(self):
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self):
        """The coefficient of the empty monomial (symbol must be constant)."""
        if not self.is_constant:
            raise ValueError(f"symbol {self} is not constant")
        return self.terms.get((0,) * len(self.vars), GR_ZERO)

    # -- arithmetic ---------------------------------------------------------

    def _check_registry(self, other):
        if self.vars != other.vars:
            raise RegistryMismatch(
                f"registries differ: {self.vars} vs {other.vars}"
            )

    def __add__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = Symbol.constant(self.vars, other)
        self._check_registry(other)
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            merged = terms.get(exps, GR_ZERO) + coeff
            if merged.is_zero:
                terms.pop(exps, None)
            else:
                terms[exps] = merged
        return Symbol(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Symbol(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = Symbol.constant(self.vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            scalar = GaussianRational.coerce(other)
            if scalar.is_zero:
                return Symbol.zero(self.vars)
            return Symbol(
                self.vars, {e: c * scalar for e, c in self.terms.items()}
            )
        self._check_registry(other)
        out = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                coeff = ca * cb
                prev = out.get(key)
                if prev is None:
                    out[key] = coeff
                else:
                    merged = prev + coeff
                    if merged.is_zero:
                        del out[key]
                    else:
                        out[key] = merged
        return Symbol(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise NegativeExponent("symbol powers must be non-negative ints")
        result = Symbol.constant(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- calculus and structure ---------------------------------------------

    def differentiate(self, name):
        """Exact partial derivative; Laurent rule applies to ``w``."""
        if name not in self.vars:
            raise UnknownVariable(f"variable {name!r} not in registry {self.vars}")
        idx = self.vars.index(name)
        out = {}
        for exps, coeff in self.terms.items():
            e = exps[idx]
            if e == 0:
                continue
            key = exps[:idx] + (e - 1,) + exps[idx + 1:]
            out[key] = out.get(key, GR_ZERO) + coeff * e
        return Symbol(self.vars, out)

    def degree_in(self, name):
        """Largest exponent of ``name`` (0 for the zero symbol)."""
        if name not in self.vars:
            raise UnknownVariable(f"variable {name!r} not in registry {self.vars}")
        idx = self.vars.index(name)
        return max((exps[idx] for exps in self.terms), default=0)

    def min_degree_in(self, name):
        if name not in self.vars:
            raise UnknownVariable(f"variable {name!r} not in registry {self.vars}")
        idx = self.vars.index(name)
        return min((exps[idx] for exps in self.terms), default=0)

    def coefficient_of(self, name, power):
        """Terms with var**power, returned with that exponent zeroed out."""
        idx = self.vars.index(name)
        out = {}
        for exps, coeff in self.terms.items():
            if exps[idx] == power:
                out[exps[:idx] + (0,) + exps[idx + 1:]] = coeff
        return Symbol(self.vars, out)

    def substitute(self, name, value):
        """Substitute an exact constant for one variable."""
        idx = self.vars.index(name)
        value = GaussianRational.coerce(value)
        out = {}
        for exps, coeff in self.terms.items():
            e = exps[idx]
            key = exps[:idx] + (0,) + exps[idx + 1:]
            scaled = coeff * (value ** e)
            prev = out.get(key, GR_ZERO) + scaled
            if prev.is_zero:
                out.pop(key, None)
            else:
                out[key] = prev
        return Symbol(self.vars, out)

    def transfer(self, new_vars, rename=None):
        """Re-express over a different registry, optionally renaming variables.

        Every (renamed) variable actually used must exist in the target
        registry; exponent positions are re-keyed.
        """
        rename = rename or {}
        new_vars = tuple(new_vars)
        positions = []
        for name in self.vars:
            target = rename.get(name, name)
            if target in new_vars:
                positions.append(new_vars.index(target))
            else:
                positions.append(None)
        out = {}
        for exps, coeff in self.terms.items():
            key = [0] * len(new_vars)
            for pos, e in zip(positions, exps):
                if e == 0:
                    continue
                if pos is None:
                    raise RegistryMismatch(
                        f"variable used by {self} is missing from {new_vars}"
                    )
                key[pos] += e
            key = tuple(key)
            merged = out.get(key, GR_ZERO) + coeff
            if merged.is_zero:
                out.pop(key, None)
            else:
                out[key] = merged
        return Symbol(new_vars, out)

    def conjugate(self):
        return Symbol(self.vars, {e: c.conjugate() for e, c in self.terms.items()})

    def evaluate(self, values):
        """Numeric evaluation; values may be scalars or numpy arrays."""
        total = 0
        for exps, coeff in self.terms.items():
            term = complex(coeff)
            for name, e in zip(self.vars, exps):
                if e == 0:
                    continue
                if name not in values:
                    raise UnknownVariable(f"no value supplied for {name!r}")
                base = values[name]
                term = term * base ** e
            total = total + term
        return total

    def is_homogeneous(self, names, degree):
        """True when every monomial has the given total degree in ``names``."""
        idxs = [self.vars.index(n) for n in names]
        return all(sum(exps[i] for i in idxs) == degree for exps in self.terms)

    # -- canonical presentation ----------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0], reverse=True)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = Symbol.constant(self.vars, other)
        if not isinstance(other, Symbol):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, tuple(self.sorted_terms())))

    def _term_str(self, exps, coeff):
        factors = []
        for name, e in zip(self.vars, exps):
            if e == 0:
                continue
            factors.append(name if e == 1 else f"{name}^{e}")
        if not factors:
            return str(coeff)
        if coeff == GR_ONE:
            return "*".join(factors)
        if coeff == -GR_ONE:
            return "-" + "*".join(factors)
        return str(coeff) + "*" + "*".join(factors)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, coeff in self.sorted_terms():
            text = self._term_str(exps, coeff)
            if not parts:
                parts.append(text)
            elif text.startswith("-"):
                parts.append("- " + text[1:])
            else:
                parts.append("+ " + text)
        return " ".join(parts)

    def __repr__(self):
        return f"Symbol({self.vars!r}, {self})"

    # -- exchange format ------------------------------------------------------

    def to_json(self):
        """Bit-exact JSON form: integer numerator/denominator pairs."""
        return {
            "vars": list(self.vars),
            "terms": [
                {
                    "exp": list(exps),
                    "re": [coeff.re.numerator, coeff.re.denominator],
                    "im": [coeff.im.numerator, coeff.im.denominator],
                }
                for exps, coeff in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, payload):
        vars = tuple(payload["vars"])
        terms = {}
        for item in payload["terms"]:
            coeff = GaussianRational(
                Fraction(item["re"][0], item["re"][1]),
                Fraction(item["im"][0], item["im"][1]),
            )
            terms[tuple(item["exp"])] = coeff
        return cls(vars, terms)


# -- registry helpers ---------------------------------------------------------

def q_names(n):
    return ("q",) if n == 1 else tuple(f"q{i}" for i in range(1, n + 1))


def p_names(n):
    return ("p",) if n == 1 else tuple(f"p{i}" for i in range(1, n + 1))


def k_names(n):
    return ("k",) if n == 1 else tuple(f"k{i}" for i in range(1, n + 1))


def contact_vars(n, extra=()):
    """Darboux registry (u, q_i, p_i) plus optional extra constants."""
    return ("u",) + q_names(n) + p_names(n) + tuple(extra)


def lifted_vars(n, extra=()):
    """Symplectification registry (w, u, q_i, k_i, hbar)."""
    return (LAURENT_VAR, "u") + q_names(n) + k_names(n) + (HBAR,) + tuple(extra)


def restricted_vars(n, extra=()):
    """Registry of star products restricted to w=1: (u, q_i, p_i, hbar)."""
    return ("u",) + q_names(n) + p_names(n) + (HBAR,) + tuple(extra)

from typing import Tuple

import sympy
from pydantic import BaseModel, ConfigDict, Field, model_validator

T = sympy.Symbol("t")


def gf2_poly(coefficients) -> sympy.Poly:
    """Poly over GF(2) from coefficients listed from the constant term up"""
    expr = sum(int(c) % 2 * T ** i for i, c in enumerate(coefficients))
    return sympy.Poly(expr, T, modulus=2)


def gf2_coefficients(poly: sympy.Poly) -> Tuple[int, ...]:
    """Coefficients of a GF(2) Poly from the constant term up, no trailing zeros"""
    if poly.is_zero:
        return ()
    coeffs = [int(c) % 2 for c in reversed(poly.all_coeffs())]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class RationalSeries(BaseModel):
    """P(t)/Q(t) over GF(2) in lowest terms with Q(0) = 1"""
    model_config = ConfigDict(frozen=True)

    numerator: Tuple[int, ...] = Field(default=(), description="Coefficients from t^0 up")
    denominator: Tuple[int, ...] = Field(default=(1,), description="Coefficients from t^0 up")

    @model_validator(mode="after")
    def _check(self) -> "RationalSeries":
        if not self.denominator or self.denominator[0] != 1:
            raise ValueError("denominator must have constant term 1")
        if any(c not in (0, 1) for c in self.numerator + self.denominator):
            raise ValueError("coefficients must lie in GF(2)")
        num, den = self.polys()
        if not num.is_zero and num.gcd(den).degree() > 0:
            raise ValueError("series is not in lowest terms")
        return self

    @classmethod
    def from_polys(cls, numerator: sympy.Poly, denominator: sympy.Poly) -> "RationalSeries":
        if numerator.is_zero:
            return cls()
        g = numerator.gcd(denominator)
        numerator = numerator.exquo(g)
        denominator = denominator.exquo(g)
        return cls(numerator=gf2_coefficients(numerator), denominator=gf2_coefficients(denominator))

    @classmethod
    def geometric(cls) -> "RationalSeries":
        """1/(1+t) = 1 + t + t^2 + ..."""
        return cls(numerator=(1,), denominator=(1, 1))

    def polys(self) -> Tuple[sympy.Poly, sympy.Poly]:
        return gf2_poly(self.numerator), gf2_poly(self.denominator)

    def expand(self, terms: int) -> Tuple[int, ...]:
        """First coefficients of the power series"""
        out = []
        num = list(self.numerator) + [0] * terms
        den = self.denominator
        for n in range(terms):
            c = num[n]
            for k in range(1, min(n, len(den) - 1) + 1):
                c ^= den[k] & out[n - k]
            out.append(c)
        return tuple(out)

    def __str__(self) -> str:
        def render(coeffs):
            terms = [("1" if i == 0 else "t" if i == 1 else f"t^{i}") for i, c in enumerate(coeffs) if c]
            return "+".join(terms) or "0"
        if not self.numerator:
            return "0"
        if self.denominator == (1,):
            return render(self.numerator)
        return f"({render(self.numerator)})/({render(self.denominator)})"

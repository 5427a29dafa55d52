"""Exact normalization constants of the invariant measures."""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, pi

from .errors import ParameterError


@dataclass(frozen=True)
class PiMultiple:
    """The real number ``coeff * pi**pi_power`` kept in exact form."""

    coeff: Fraction
    pi_power: int

    def __float__(self):
        return float(self.coeff) * pi ** self.pi_power

    def __truediv__(self, other):
        return PiMultiple(self.coeff / other.coeff, self.pi_power - other.pi_power)

    def to_json_obj(self):
        return {"rational": f"{self.coeff.numerator}/{self.coeff.denominator}", "pi_power": self.pi_power}


def normalization_constant(p, q, n):
    """``C_n = pi^{-pq} prod_{i<q} (n-q+i)! / (n-p-q+i)!``.

    Raises
    ------
    ParameterError
        If ``n < p + q``.
    """
    if p < 1 or q < 1:
        raise ParameterError("p and q must be positive")
    if n < p + q:
        raise ParameterError(f"C_n needs n >= p+q, got n={n}, p+q={p + q}")
    num = 1
    den = 1
    for i in range(q):
        num *= factorial(n - q + i)
        den *= factorial(n - p - q + i)
    return PiMultiple(Fraction(num, den), -p * q)

"""Polynomial sequences with deg q_n = n and the convolution identity

    q_n(x + y) = sum_{k=0}^{n} q_k(y) * q_{n-k}(x).

Sequences satisfying it are called tokens here; multiplying term n by n!
gives a sequence of binomial type, which satisfies the same identity with
binomial coefficients.  All coefficients are exact rationals and every check
is a symbolic coefficient comparison, never numeric sampling.

Built-in families: the exponential monomials x^n/n!, falling and rising
factorials, and the Abel polynomials x(x - a n)^{n-1} (token-normalised).
Laguerre is deliberately not built in; normalisation conventions differ
across sources, so Laguerre tables should be supplied via the CSV loader
and verified like any user sequence.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Rational = Fraction

FAMILIES = ("exponential-monomial", "falling-factorial", "rising-factorial", "abel")


@dataclass(frozen=True)
class PolySeq:
    """Dense rational coefficient table: coeffs[n][j] is [x^j] q_n."""

    family: str
    params: tuple[Fraction, ...]
    coeffs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        clean = []
        for n, row in enumerate(self.coeffs):
            row = tuple(Fraction(c) for c in row)
            if len(row) != n + 1:
                raise ValueError(f"q_{n} must have exactly {n + 1} coefficients")
            if row[-1] == 0:
                raise ValueError(f"q_{n} must have degree exactly {n}")
            clean.append(row)
        object.__setattr__(self, "coeffs", tuple(clean))
        object.__setattr__(self, "params", tuple(Fraction(p) for p in self.params))

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def poly(self, n: int) -> tuple[Fraction, ...]:
        return self.coeffs[n]

    def evaluate(self, n: int, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs[n]):
            acc = acc * x + c
        return acc


def _poly_mul_linear(coeffs: list[Fraction], shift: Fraction) -> list[Fraction]:
    """Multiply a dense polynomial by (x + shift)."""
    out = [Fraction(0)] * (len(coeffs) + 1)
    for j, c in enumerate(coeffs):
        out[j + 1] += c
        out[j] += c * shift
    return out


def _scaled(coeffs: Sequence[Fraction], factor: Fraction) -> tuple[Fraction, ...]:
    return tuple(c * factor for c in coeffs)


def standard_token(family: str, n_max: int, param: Optional[Fraction] = None) -> PolySeq:
    """Token-normalised q_n = p_n / n! of a named binomial-type family."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    params: tuple[Fraction, ...] = ()
    rows: list[tuple[Fraction, ...]] = []
    if family == "exponential-monomial":
        for n in range(n_max + 1):
            row = [Fraction(0)] * n + [Fraction(1, math.factorial(n))]
            rows.append(tuple(row))
    elif family in ("falling-factorial", "rising-factorial"):
        sign = -1 if family == "falling-factorial" else 1
        p: list[Fraction] = [Fraction(1)]
        rows.append(tuple(p))
        for n in range(1, n_max + 1):
            p = _poly_mul_linear(p, Fraction(sign * (n - 1)))
            rows.append(_scaled(p, Fraction(1, math.factorial(n))))
    else:  # abel
        a = Fraction(1) if param is None else Fraction(param)
        params = (a,)
        rows.append((Fraction(1),))
        for n in range(1, n_max + 1):
            # p_n(x) = x * (x - a n)^(n-1)
            p = [Fraction(0)] * (n + 1)
            for i in range(n):
                p[i + 1] = math.comb(n - 1, i) * (-a * n) ** (n - 1 - i)
            rows.append(_scaled(p, Fraction(1, math.factorial(n))))
    return PolySeq(family, params, tuple(rows))


def binomial_from_token(seq: PolySeq) -> PolySeq:
    """p_n = n! * q_n."""
    rows = tuple(
        _scaled(row, Fraction(math.factorial(n))) for n, row in enumerate(seq.coeffs)
    )
    return PolySeq(seq.family, seq.params, rows)


def token_from_binomial(seq: PolySeq) -> PolySeq:
    """q_n = p_n / n!; inverse of binomial_from_token."""
    rows = tuple(
        _scaled(row, Fraction(1, math.factorial(n))) for n, row in enumerate(seq.coeffs)
    )
    return PolySeq(seq.family, seq.params, rows)


Bivariate = dict[tuple[int, int], Fraction]


def _bivariate_shift(coeffs: Sequence[Fraction]) -> Bivariate:
    """Expand q(x + y) into monomials x^i y^j."""
    out: Bivariate = {}
    for d, c in enumerate(coeffs):
        if c == 0:
            continue
        for i in range(d + 1):
            key = (i, d - i)
            out[key] = out.get(key, Fraction(0)) + c * math.comb(d, i)
    return {k: v for k, v in out.items() if v != 0}


def _bivariate_product(
    in_x: Sequence[Fraction], in_y: Sequence[Fraction], factor: Fraction
) -> Bivariate:
    out: Bivariate = {}
    for i, cx in enumerate(in_x):
        if cx == 0:
            continue
        for j, cy in enumerate(in_y):
            if cy == 0:
                continue
            out[(i, j)] = factor * cx * cy
    return out


def _bivariate_sum(parts: list[Bivariate]) -> Bivariate:
    out: Bivariate = {}
    for part in parts:
        for key, val in part.items():
            out[key] = out.get(key, Fraction(0)) + val
    return {k: v for k, v in out.items() if v != 0}


@dataclass(frozen=True)
class IdentityFailure:
    n: int
    monomial: str
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class VerificationReport:
    family: str
    n_max: int
    failures: tuple[IdentityFailure, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json_obj(self) -> dict:
        return {
            "family": self.family,
            "n_max": self.n_max,
            "pass": self.passed,
            "failures": [
                {"n": f.n, "monomial": f.monomial, "lhs": str(f.lhs), "rhs": str(f.rhs)}
                for f in self.failures
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)


def _first_difference(n: int, lhs: Bivariate, rhs: Bivariate) -> Optional[IdentityFailure]:
    for key in sorted(set(lhs) | set(rhs)):
        a = lhs.get(key, Fraction(0))
        b = rhs.get(key, Fraction(0))
        if a != b:
            i, j = key
            return IdentityFailure(n, f"x^{i} y^{j}", a, b)
    return None


def verify_token_identity(seq: PolySeq, n_max: Optional[int] = None) -> VerificationReport:
    """Check q_n(x+y) = sum_k q_k(y) q_{n-k}(x) exactly for n <= n_max."""
    n_max = seq.n_max if n_max is None else n_max
    if n_max > seq.n_max:
        raise ValueError(f"sequence holds degrees 0..{seq.n_max}, asked for {n_max}")
    failures = []
    for n in range(n_max + 1):
        lhs = _bivariate_shift(seq.coeffs[n])
        rhs = _bivariate_sum(
            [
                _bivariate_product(seq.coeffs[n - k], seq.coeffs[k], Fraction(1))
                for k in range(n + 1)
            ]
        )
        diff = _first_difference(n, lhs, rhs)
        if diff is not None:
            failures.append(diff)
    return VerificationReport(seq.family, n_max, tuple(failures))


def verify_binomial_identity(seq: PolySeq, n_max: Optional[int] = None) -> VerificationReport:
    """Check p_n(x+y) = sum_k C(n,k) p_k(x) p_{n-k}(y) exactly for n <= n_max."""
    n_max = seq.n_max if n_max is None else n_max
    if n_max > seq.n_max:
        raise ValueError(f"sequence holds degrees 0..{seq.n_max}, asked for {n_max}")
    failures = []
    for n in range(n_max + 1):
        lhs = _bivariate_shift(seq.coeffs[n])
        rhs = _bivariate_sum(
            [
                _bivariate_product(
                    seq.coeffs[k], seq.coeffs[n - k], Fraction(math.comb(n, k))
                )
                for k in range(n + 1)
            ]
        )
        diff = _first_difference(n, lhs, rhs)
        if diff is not None:
            failures.append(diff)
    return VerificationReport(seq.family, n_max, tuple(failures))


def h_symbol_coeffs(seq: PolySeq, k_max: int) -> list[Fraction]:
    """[q_0'(0), ..., q_K'(0)]: the linear coefficient of each q_k, exactly."""
    if k_max > seq.n_max:
        raise ValueError(f"sequence holds degrees 0..{seq.n_max}, asked for {k_max}")
    out = []
    for k in range(k_max + 1):
        out.append(seq.coeffs[k][1] if k >= 1 else Fraction(0))
    return out


def load_coeff_csv(text: str, family: str = "csv") -> PolySeq:
    """Read rows `n,c0,c1,...` with rationals written as "a/b" (or integers)."""
    rows: dict[int, tuple[Fraction, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if fields[0] == "n":  # optional header
            continue
        try:
            n = int(fields[0])
            coeffs = tuple(Fraction(f) for f in fields[1:])
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"row {lineno}: {exc}") from None
        if n in rows:
            raise ValueError(f"row {lineno}: duplicate degree {n}")
        if len(coeffs) != n + 1:
            raise ValueError(f"row {lineno}: q_{n} needs {n + 1} coefficients")
        rows[n] = coeffs
    if not rows:
        raise ValueError("no coefficient rows")
    n_max = max(rows)
    if set(rows) != set(range(n_max + 1)):
        raise ValueError(f"degrees must cover 0..{n_max} without gaps")
    return PolySeq(family, (), tuple(rows[n] for n in range(n_max + 1)))

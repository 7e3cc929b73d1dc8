"""Exact lower bounds on the number of maximum genus embeddings.

* :func:`f1` - the v-type-edge bound for ``K_{n,n}``, ``n`` odd.
* :func:`f2` - Ren's bound ``prod (d(v) - 1)! / 4**gamma_M`` specialised to ``K_{n,n}``.
* :func:`stahl_bound` - Stahl's bound on embeddings with at most two faces.

Everything is integer or :class:`fractions.Fraction` arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

# Differences f1(n) - f2(n) as printed in the literature; n = 3 disagrees
# with the formulas (they give 12).
PRINTED_F1_MINUS_F2 = {3: 16, 5: 6772211712}


def factorial(m: int) -> int:
    if m < 0:
        raise ValueError(f"factorial of negative number {m}")
    return math.factorial(m)


def stahl_factorial(m: int) -> int:
    """``m!`` with the convention ``m! = 1`` for every ``m <= 0``."""
    return 1 if m <= 0 else math.factorial(m)


def double_factorial(m: int) -> int:
    if m < -1:
        raise ValueError(f"double factorial undefined for {m}")
    return math.prod(range(m, 1, -2))


def _require_odd(n: int, minimum: int = 1) -> None:
    if n < minimum or n % 2 == 0:
        raise ValueError(f"n must be odd and >= {minimum}, got {n}")


def f1(n: int) -> int:
    """``2**((n-1)/2) * ((n-2)!!)**n * ((n-1)!)**n``."""
    _require_odd(n)
    return 2 ** ((n - 1) // 2) * double_factorial(n - 2) ** n * factorial(n - 1) ** n


def max_genus_knn(n: int) -> int:
    # K_{n,n} is upper embeddable and its Betti number (n-1)^2 is even for odd n
    return (n - 1) ** 2 // 2


def f2(n: int) -> Fraction:
    _require_odd(n, 3)
    return Fraction(factorial(n - 1) ** (2 * n), 4 ** max_genus_knn(n))


def stahl_bound(degrees: Sequence[int]) -> int:
    """Stahl's bound, applying the ``(d-5)!`` factor to the first four entries as given."""
    degrees = list(degrees)
    if not degrees:
        raise ValueError("empty degree sequence")
    if any(d < 1 for d in degrees):
        raise ValueError(f"degrees must be positive: {degrees}")
    head = math.prod(stahl_factorial(d - 5) for d in degrees[:4])
    tail = math.prod(stahl_factorial(d - 2) for d in degrees[4:])
    return head * tail


def stahl_bound_sorted(degrees: Iterable[int]) -> int:
    """Stahl's bound with the four smallest degrees taking the ``(d-5)!`` factor.

    ``(d-2)!/(d-5)!`` grows with ``d``, so this ordering gives the largest value.
    """
    return stahl_bound(sorted(degrees))


def knn_degrees(n: int) -> list[int]:
    return [n] * (2 * n)


def _sign(a, b) -> int:
    return (a > b) - (a < b)


@dataclass(frozen=True)
class BoundReport:
    n: int
    f1: int
    f2: Fraction
    stahl: int

    @property
    def f1_minus_f2(self) -> Fraction:
        return self.f1 - self.f2

    @property
    def f1_minus_stahl(self) -> int:
        return self.f1 - self.stahl

    @property
    def f1_vs_f2(self) -> int:
        return _sign(self.f1, self.f2)

    @property
    def f1_vs_stahl(self) -> int:
        return _sign(self.f1, self.stahl)

    @property
    def printed_difference(self) -> int | None:
        return PRINTED_F1_MINUS_F2.get(self.n)

    @property
    def difference_matches_printed(self) -> bool | None:
        printed = self.printed_difference
        return None if printed is None else self.f1_minus_f2 == printed


def compare_table(n_values: Iterable[int]) -> list[BoundReport]:
    rows = []
    for n in n_values:
        _require_odd(n, 3)
        rows.append(BoundReport(n, f1(n), f2(n), stahl_bound_sorted(knn_degrees(n))))
    return rows


def exact(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def magnitude(v) -> str:
    """Rough size of an exact value, e.g. ``~7.73e9`` (display only)."""
    v = Fraction(v)
    sign = "-" if v < 0 else ""
    digits = str(abs(v.numerator) // v.denominator)
    if len(digits) <= 4:
        return f"{sign}{exact(abs(v))}"
    return f"~{sign}{digits[0]}.{digits[1:3]}e{len(digits) - 1}"


_ORDER = {1: ">", 0: "=", -1: "<"}


def render_table(rows: Sequence[BoundReport]) -> str:
    header = ("n", "f1", "f2", "stahl", "f1-f2", "f1?f2", "f1?stahl")
    body = [header]
    for r in rows:
        body.append((str(r.n), magnitude(r.f1), magnitude(r.f2), magnitude(r.stahl),
                     magnitude(r.f1_minus_f2), _ORDER[r.f1_vs_f2], _ORDER[r.f1_vs_stahl]))
    widths = [max(len(row[i]) for row in body) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in body]
    lines.append("")
    lines.append("exact values:")
    for r in rows:
        lines.append(f"  n={r.n} f1={r.f1}")
        lines.append(f"  n={r.n} f2={exact(r.f2)}")
        lines.append(f"  n={r.n} stahl={r.stahl}")
        lines.append(f"  n={r.n} f1-f2={exact(r.f1_minus_f2)}")
    notes = discrepancy_notes(rows)
    if notes:
        lines.append("")
        lines.extend(notes)
    return "\n".join(lines) + "\n"


def discrepancy_notes(rows: Sequence[BoundReport]) -> list[str]:
    notes = []
    for r in rows:
        if r.difference_matches_printed is False:
            notes.append(f"note: n={r.n}: formulas give f1-f2={exact(r.f1_minus_f2)}, "
                         f"published value is {r.printed_difference} (discrepancy)")
    return notes


def render_records(rows: Sequence[BoundReport]) -> str:
    out = []
    for r in rows:
        printed = ""
        if r.printed_difference is not None:
            printed = (f" printed_f1_minus_f2={r.printed_difference}"
                       f" printed_matches={int(r.difference_matches_printed)}")
        out.append(
            f"n={r.n} f1={r.f1} f2={exact(r.f2)} stahl={r.stahl} "
            f"f1_minus_f2={exact(r.f1_minus_f2)} f1_vs_f2={_ORDER[r.f1_vs_f2]} "
            f"f1_vs_stahl={_ORDER[r.f1_vs_stahl]}{printed}"
        )
    return "\n".join(out) + "\n"

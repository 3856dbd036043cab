"""Multiplication tables for Cliff(2) and Cliff(3) transcribed from a published
Mathematica listing, and that listing's operator construction reproduced
literally (``TensorProduct``, ``Transpose`` with a level permutation,
``Flatten``).

The Cliff(2) table lists ``+h^2`` for ``e12 e12``; the generated algebra has
``-h^2``.  Both are kept so the difference can be reported.
"""
from __future__ import annotations

import re

import numpy as np

from .algebra import ProductCurve

CLIFF2_TABLE = """
{{{1, 0, 0, 0}, {0, h, 0, 0}, {0, 0, h, 0}, {0, 0, 0, h^2}},
 {{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -h}, {0, 0, h, 0}},
 {{0, 0, 1, 0}, {0, 0, 0, h}, {1, 0, 0, 0}, {0, -h, 0, 0}},
 {{0, 0, 0, 1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {1, 0, 0, 0}}}
"""

CLIFF3_TABLE = """
{{{1, 0, 0, 0, 0, 0, 0, 0}, {0, h, 0, 0, 0, 0, 0, 0},
  {0, 0, h, 0, 0, 0, 0, 0}, {0, 0, 0, h, 0, 0, 0, 0},
  {0, 0, 0, 0, -h^2, 0, 0, 0}, {0, 0, 0, 0, 0, -h^2, 0, 0},
  {0, 0, 0, 0, 0, 0, -h^2, 0}, {0, 0, 0, 0, 0, 0, 0, -h^3}},
 {{0, 1, 0, 0, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 0, 0, 0},
  {0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, h, 0, 0},
  {0, 0, 0, 0, 0, 0, 0, -h^2}, {0, 0, 0, -h, 0, 0, 0, 0},
  {0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, -h^2, 0, 0, 0}},
 {{0, 0, 1, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, h, 0},
  {1, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 0},
  {0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, -h^2},
  {0, -h, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, -h^2, 0, 0}},
 {{0, 0, 0, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 0},
  {0, 0, 0, 0, h, 0, 0, 0}, {1, 0, 0, 0, 0, 0, 0, 0},
  {0, 0, -h, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 0},
  {0, 0, 0, 0, 0, 0, 0, -h^2}, {0, 0, 0, 0, 0, 0, -h^2, 0}},
 {{0, 0, 0, 0, 1, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, h},
  {0, 0, 0, 1, 0, 0, 0, 0}, {0, 0, -1, 0, 0, 0, 0, 0},
  {1, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 0},
  {0, 0, 0, 0, 0, 0, 0, 0}, {0, h, 0, 0, 0, 0, 0, 0}},
 {{0, 0, 0, 0, 0, 1, 0, 0}, {0, 0, 0, -1, 0, 0, 0, 0},
  {0, 0, 0, 0, 0, 0, 0, h}, {0, 1, 0, 0, 0, 0, 0, 0},
  {0, 0, 0, 0, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 0, 0, 0},
  {0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, h, 0, 0, 0, 0, 0}},
 {{0, 0, 0, 0, 0, 0, 1, 0}, {0, 0, 1, 0, 0, 0, 0, 0},
  {0, -1, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, h},
  {0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 0},
  {1, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, h, 0, 0, 0, 0}},
 {{0, 0, 0, 0, 0, 0, 0, 1}, {0, 0, 0, 0, 1, 0, 0, 0},
  {0, 0, 0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 0, 0, 1, 0},
  {0, 1, 0, 0, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0, 0, 0},
  {0, 0, 0, 1, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 0, 0, 0}}}
"""

_MONOMIAL = re.compile(r"^(-?)(\d*)(h(?:\^(\d+))?)?$")


def _parse_monomial(token: str) -> tuple:
    m = _MONOMIAL.match(token.strip())
    if not m or (not m.group(2) and not m.group(3)):
        raise ValueError(f"unrecognised table entry {token!r}")
    sign = -1 if m.group(1) else 1
    coef = int(m.group(2)) if m.group(2) else 1
    power = 0 if not m.group(3) else int(m.group(4) or 1)
    return sign * coef, power


def parse_table(text: str) -> ProductCurve:
    """Parse a nested-brace table of monomials in ``h`` into a polynomial curve."""
    tokens = re.findall(r"[^{},\s]+", text)
    entries = [_parse_monomial(t) for t in tokens]
    n = round(len(entries) ** (1 / 3))
    if n**3 != len(entries):
        raise ValueError(f"{len(entries)} entries do not form a cubic table")
    degree = max(p for _, p in entries)
    coeffs = np.zeros((degree + 1, n**3))
    for flat, (coef, power) in enumerate(entries):
        coeffs[power, flat] = coef
    return ProductCurve(tuple(c.reshape(n, n, n) for c in coeffs))


def transcribed_curve(n: int) -> ProductCurve:
    tables = {2: CLIFF2_TABLE, 3: CLIFF3_TABLE}
    if n not in tables:
        raise ValueError("tables exist for Cliff(2) and Cliff(3) only")
    return parse_table(tables[n])


def mathematica_transpose(array: np.ndarray, perm) -> np.ndarray:
    """``Transpose[array, perm]``: level ``k`` of the input becomes level ``perm[k]``."""
    return np.moveaxis(array, list(range(array.ndim)), [p - 1 for p in perm])


def mathematica_operator(s: np.ndarray) -> np.ndarray:
    """The ``m[h]`` matrix of the listing, built exactly as its code prescribes."""
    s = np.asarray(s)
    n = s.shape[0]
    G = np.eye(n)
    T = np.multiply.outer(np.multiply.outer(s, G), G)
    R = mathematica_transpose(T, (3, 4, 6, 1, 2, 5, 7)) - mathematica_transpose(
        T, (5, 1, 6, 4, 2, 3, 7)
    )
    return R.reshape(n**3, n**4)

"""Arithmetic for GF(2^8) and GF(2).

Field elements are plain ints. GF(2^8) is F_2[x] / (x^8 + x^4 + x^3 + x + 1),
modulus 0x11B, with an element's bits as polynomial coefficients. Addition is
XOR. Multiplication goes through log/antilog tables built once at import from
the generator 0x03; the tables are bit-identical to carry-less multiplication
followed by reduction mod 0x11B.

GF(2) uses the same call surface (add/mul/inv on {0, 1}) so that elimination
code can run over either field.
"""

from __future__ import annotations

POLY = 0x11B
GENERATOR = 0x03


def _mul_reduce(a: int, b: int) -> int:
    """Carry-less product of a and b reduced mod POLY. Table-free."""
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        a <<= 1
        if a & 0x100:
            a ^= POLY
    return acc


def _build_tables() -> tuple[list[int], list[int]]:
    exp = [0] * 510
    log = [0] * 256
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x = _mul_reduce(x, GENERATOR)
    if x != 1:
        raise AssertionError("generator 0x03 does not have order 255")
    exp[255:510] = exp[0:255]
    return exp, log


EXP, LOG = _build_tables()

# MUL_ROWS[a][b] == gf_mul(a, b); row lists keep the hot loops on plain
# list indexing.
MUL_ROWS = [[0] * 256] + [
    [0] + [EXP[LOG[a] + LOG[b]] for b in range(1, 256)] for a in range(1, 256)
]

INVERSE = [0] + [EXP[255 - LOG[a]] for a in range(1, 256)]


def gf_add(a: int, b: int) -> int:
    """Sum (and difference) of two field elements: XOR."""
    return a ^ b


def gf_mul(a: int, b: int) -> int:
    """Product of two GF(2^8) elements."""
    return MUL_ROWS[a][b]


def gf_inv(a: int) -> int:
    """Multiplicative inverse of a nonzero GF(2^8) element.

    Raises:
        ZeroDivisionError: if a == 0.
    """
    if a == 0:
        raise ZeroDivisionError("0 has no multiplicative inverse in GF(2^8)")
    return INVERSE[a]


class Field:
    """A byte-valued finite field presented as lookup tables.

    Attributes:
        order: number of field elements.
        mul_rows: mul_rows[a][b] is the product a*b.
        inverse: inverse[a] is a^-1 for a != 0 (index 0 unused).
    """

    __slots__ = ("order", "mul_rows", "inverse", "name")

    def __init__(self, order: int, mul_rows: list[list[int]], inverse: list[int], name: str):
        self.order = order
        self.mul_rows = mul_rows
        self.inverse = inverse
        self.name = name

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return self.mul_rows[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no multiplicative inverse in {self.name}")
        return self.inverse[a]

    def __repr__(self) -> str:
        return f"Field({self.name})"


GF256 = Field(256, MUL_ROWS, INVERSE, "GF(2^8)")

# GF(2): add is XOR, mul is AND, 1 is its own inverse.
GF2 = Field(2, [[0, 0], [0, 1]], [0, 1], "GF(2)")

"""Random linear fountain code over GF(2^8).

A file is split into k equal chunks (zero-padded). A coded chunk is a random
GF(2^8) linear combination of the source chunks, shipped together with its
coefficient vector. Any k coded chunks with linearly independent coefficients
reconstruct the file.

The Decoder keeps its received rows in reduced row echelon form and absorbs
one chunk at a time, so rank queries and innovation checks are incremental
and the canonical row space is available as a hashable key.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .gf256 import EXP, GF256, LOG, Field

_EXP_NP = np.array(EXP, dtype=np.uint8)
_LOG_NP = np.array(LOG, dtype=np.int16)


class CodedChunk(NamedTuple):
    """One coded chunk: payload bytes plus the coefficients that formed it.

    pool_index identifies the pool vector the chunk was encoded from, or None
    for a freshly drawn coefficient vector.
    """

    coeffs: bytes
    data: bytes
    pool_index: Optional[int]


@dataclass(frozen=True)
class SourceFile:
    """A payload split into k chunks of chunk_len bytes (last one zero-padded)."""

    payload: bytes  # already padded to k * chunk_len
    k: int
    chunk_len: int
    chunks: tuple[bytes, ...]


@dataclass(frozen=True)
class CodePool:
    """A fixed pool of K coefficient vectors the server draws from."""

    k: int
    K: int
    vectors: tuple[bytes, ...]


def split_file(payload: bytes, k: int) -> SourceFile:
    """Split payload into k chunks of ceil(len/k) bytes, zero-padding the tail.

    Raises:
        ValueError: if payload is empty or k < 1.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not payload:
        raise ValueError("payload must be non-empty")
    chunk_len = -(-len(payload) // k)
    padded = payload.ljust(k * chunk_len, b"\x00")
    chunks = tuple(padded[i * chunk_len : (i + 1) * chunk_len] for i in range(k))
    return SourceFile(payload=padded, k=k, chunk_len=chunk_len, chunks=chunks)


def draw_coefficients(k: int, rng: random.Random) -> bytes:
    """Draw k i.i.d. uniform GF(2^8) coefficients, redrawing the all-zero vector."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    while True:
        v = rng.randbytes(k)
        if any(v):
            return v


def grouped_coefficients(m: int, group: int, rng: random.Random) -> bytes:
    """Coefficient vector for k = 2^m chunks, constant on blocks of `group` chunks.

    With group = 2 every pair of adjacent chunks shares one coefficient, so the
    vector is also a valid draw for the coarser code whose chunks are the
    concatenated pairs. group must be a power-of-two divisor of k.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    k = 1 << m
    if group < 1 or group & (group - 1) or group > k:
        raise ValueError(f"group must be a power-of-two divisor of {k}, got {group}")
    blocks = k // group
    while True:
        draws = rng.randbytes(blocks)
        if any(draws):
            return b"".join(bytes([b]) * group for b in draws)


def encode(source: SourceFile, coeffs: bytes, pool_index: Optional[int] = None) -> CodedChunk:
    """Combine the source chunks with the given coefficients into one coded chunk."""
    if len(coeffs) != source.k:
        raise ValueError(f"need {source.k} coefficients, got {len(coeffs)}")
    acc = bytearray(source.chunk_len)
    mul_rows = GF256.mul_rows
    for j, c in enumerate(coeffs):
        if c:
            mr = mul_rows[c]
            chunk = source.chunks[j]
            for b in range(source.chunk_len):
                acc[b] ^= mr[chunk[b]]
    return CodedChunk(coeffs=bytes(coeffs), data=bytes(acc), pool_index=pool_index)


def build_pool(k: int, K: int, rng: random.Random) -> CodePool:
    """Draw a pool of K nonzero coefficient vectors of length k.

    Raises:
        ValueError: if K < k (the pool could never reach full rank).
    """
    if K < k:
        raise ValueError(f"pool size K={K} must be >= k={k}")
    raw = rng.randbytes(K * k)
    vectors = []
    for i in range(K):
        v = raw[i * k : (i + 1) * k]
        while not any(v):
            v = rng.randbytes(k)
        vectors.append(v)
    return CodePool(k=k, K=K, vectors=tuple(vectors))


def encode_pool(source: SourceFile, pool: CodePool) -> list[CodedChunk]:
    """Encode every pool vector against the source in one vectorized pass."""
    if pool.k != source.k:
        raise ValueError(f"pool k={pool.k} does not match source k={source.k}")
    C = np.frombuffer(b"".join(pool.vectors), dtype=np.uint8).reshape(pool.K, pool.k)
    S = np.frombuffer(source.payload, dtype=np.uint8).reshape(source.k, source.chunk_len)
    # log-domain product with an explicit zero mask, XOR-folded over the k axis
    t = _LOG_NP[C][:, :, None] + _LOG_NP[S][None, :, :]
    prod = np.where((C[:, :, None] != 0) & (S[None, :, :] != 0), _EXP_NP[t], 0)
    data = np.bitwise_xor.reduce(prod, axis=1)
    return [
        CodedChunk(coeffs=pool.vectors[i], data=data[i].tobytes(), pool_index=i)
        for i in range(pool.K)
    ]


class Decoder:
    """Incremental Gaussian elimination over a pluggable byte field.

    Rows are kept in reduced row echelon form: each pivot is 1, pivot columns
    are cleared in every other row, and rows are ordered by pivot column. That
    makes the row span canonical, so `space_key()` is a hashable identifier of
    the subspace, and makes `decode()` at full rank a plain concatenation.
    """

    __slots__ = ("k", "field", "chunk_len", "_cols", "_coef", "_data", "_key")

    def __init__(self, k: int, field: Field = GF256):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        self.k = k
        self.field = field
        self.chunk_len: Optional[int] = None
        self._cols: list[int] = []
        self._coef: list[list[int]] = []
        self._data: list[list[int]] = []
        self._key: Optional[bytes] = b""

    @property
    def rank(self) -> int:
        return len(self._cols)

    def is_innovative(self, chunk: CodedChunk) -> bool:
        """True iff absorbing the chunk would raise the rank. Leaves state alone."""
        return self.coeffs_innovative(chunk.coeffs)

    def coeffs_innovative(self, coeffs: Sequence[int]) -> bool:
        """Innovation test on a bare coefficient vector.

        Walks the columns once: at a pivot column the entry is eliminated, and
        a nonzero entry at a non-pivot column can never be touched by later
        pivot rows (their leading zeros extend past it), so it proves
        independence immediately.
        """
        if len(coeffs) != self.k:
            raise ValueError(f"need {self.k} coefficients, got {len(coeffs)}")
        cols = self._cols
        if not cols:
            return any(coeffs)
        if len(cols) == self.k:
            return False
        v = list(coeffs)
        mul_rows = self.field.mul_rows
        pi = 0
        npiv = len(cols)
        for c in range(self.k):
            fv = v[c]
            if pi < npiv and cols[pi] == c:
                if fv:
                    mr = mul_rows[fv]
                    row = self._coef[pi]
                    for j in range(c, self.k):
                        rv = row[j]
                        if rv:
                            v[j] ^= mr[rv]
                pi += 1
            elif fv:
                return True
        return False

    def absorb(self, chunk: CodedChunk) -> int:
        """Fold one coded chunk into the decoder. Returns the new rank.

        A dependent chunk reduces to zero and leaves the decoder unchanged;
        rank never decreases.
        """
        k = self.k
        if len(chunk.coeffs) != k:
            raise ValueError(f"need {k} coefficients, got {len(chunk.coeffs)}")
        if self.chunk_len is None:
            self.chunk_len = len(chunk.data)
        elif len(chunk.data) != self.chunk_len:
            raise ValueError(
                f"chunk data length {len(chunk.data)} != established {self.chunk_len}"
            )
        mul_rows = self.field.mul_rows
        v = list(chunk.coeffs)
        d = list(chunk.data)
        # forward-reduce against existing pivot rows
        for i, c in enumerate(self._cols):
            fv = v[c]
            if fv:
                mr = mul_rows[fv]
                row = self._coef[i]
                for j in range(c, k):
                    rv = row[j]
                    if rv:
                        v[j] ^= mr[rv]
                drow = self._data[i]
                for j, dv in enumerate(drow):
                    if dv:
                        d[j] ^= mr[dv]
        lead = -1
        for c in range(k):
            if v[c]:
                lead = c
                break
        if lead < 0:
            return len(self._cols)  # dependent: nothing to do
        # normalize the pivot to 1
        fv = v[lead]
        if fv != 1:
            mr = mul_rows[self.field.inv(fv)]
            v = [mr[x] for x in v]
            d = [mr[x] for x in d]
        # clear the new pivot column from existing rows (keeps RREF)
        for i in range(len(self._cols)):
            fv = self._coef[i][lead]
            if fv:
                mr = mul_rows[fv]
                row = self._coef[i]
                for j in range(lead, k):
                    rv = v[j]
                    if rv:
                        row[j] ^= mr[rv]
                drow = self._data[i]
                for j, dv in enumerate(d):
                    if dv:
                        drow[j] ^= mr[dv]
        pos = 0
        while pos < len(self._cols) and self._cols[pos] < lead:
            pos += 1
        self._cols.insert(pos, lead)
        self._coef.insert(pos, v)
        self._data.insert(pos, d)
        self._key = None
        return len(self._cols)

    def decode(self) -> bytes:
        """Reassemble the padded payload. Requires full rank.

        Raises:
            RuntimeError: if rank < k.
        """
        if len(self._cols) != self.k:
            raise RuntimeError(f"decode needs rank {self.k}, have {len(self._cols)}")
        # full-rank RREF is the identity, so data rows are the chunks in order
        return b"".join(bytes(d) for d in self._data)

    def space_key(self) -> bytes:
        """Canonical byte string identifying the row space (RREF rows, in order)."""
        if self._key is None:
            self._key = b"".join(bytes(r) for r in self._coef)
        return self._key

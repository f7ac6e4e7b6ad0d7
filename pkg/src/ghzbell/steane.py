"""The [[7,1,3]] Steane code and a minimum-weight decoder that uses erasure locations.

Position ``i`` (0..6) has parity-check column ``binary(i + 1)``, so the
syndrome of a single flip at ``i`` reads ``i + 1``. The same 3x7 check matrix
serves the X and Z sectors. Two error patterns with equal syndrome differ by
a Hamming codeword; the even-weight codewords are stabilizers and the
odd-weight ones are logical operators, so the logical class of a pattern
(for a fixed syndrome) is just its weight parity.

Patterns are passed around as 7-bit integer masks (bit ``i`` = position ``i``)
in the vectorized paths and as 0/1 arrays at the public surface.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

N_QUBITS = 7
N_CHECKS = 3


class DecoderFailure(Exception):
    """Minimum-weight corrections fall into both logical classes."""


@dataclass(frozen=True)
class SteaneCode:
    parity_check: np.ndarray
    logical_support: np.ndarray

    @classmethod
    def standard(cls) -> "SteaneCode":
        h = np.array([[((i + 1) >> (N_CHECKS - 1 - r)) & 1 for i in range(N_QUBITS)] for r in range(N_CHECKS)], dtype=np.uint8)
        h.setflags(write=False)
        logical = np.ones(N_QUBITS, dtype=np.uint8)
        logical.setflags(write=False)
        return cls(h, logical)

    def syndrome(self, error: Iterable[int]) -> np.ndarray:
        return (self.parity_check @ np.asarray(list(error), dtype=np.int64)) % 2

    def generator(self) -> np.ndarray:
        """Basis of the classical [7,4] Hamming code (kernel of the check matrix)."""
        return _nullspace_gf2(self.parity_check)


STEANE = SteaneCode.standard()


def mask_of(bits: Iterable[int]) -> int:
    return sum(1 << i for i, b in enumerate(bits) if b)


def bits_of(mask: int, n: int = N_QUBITS) -> np.ndarray:
    return np.array([(mask >> i) & 1 for i in range(n)], dtype=np.uint8)


def syndrome_int(syndrome: Iterable[int]) -> int:
    s = list(syndrome)
    if len(s) != N_CHECKS:
        raise ValueError(f"syndrome must have {N_CHECKS} bits, got {len(s)}")
    if any(b not in (0, 1) for b in s):
        raise ValueError(f"syndrome bits must be 0/1, got {s}")
    return (s[0] << 2) | (s[1] << 1) | s[2]


def _rref_gf2(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    a = a.copy() % 2
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        hit = [i for i in range(r, rows) if a[i, c]]
        if not hit:
            continue
        a[[r, hit[0]]] = a[[hit[0], r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def _nullspace_gf2(a: np.ndarray) -> np.ndarray:
    rref, pivots = _rref_gf2(np.asarray(a, dtype=np.uint8))
    cols = rref.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = rref[i, f]
        basis.append(v)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), cols)


def _solve_gf2(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """Particular solution and nullspace basis of ``a x = b`` over GF(2), or None."""
    aug = np.concatenate([a, b.reshape(-1, 1)], axis=1).astype(np.uint8)
    rref, pivots = _rref_gf2(aug)
    n = a.shape[1]
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.uint8)
    for i, p in enumerate(pivots):
        x[p] = rref[i, n]
    return x, _nullspace_gf2(a)


def decode_with_erasures(syndrome: Iterable[int], erasures: Iterable[int] = ()) -> np.ndarray:
    """Minimum-weight correction for ``syndrome`` with free flips on erased positions.

    Flips on erased positions cost nothing; flips elsewhere cost one each.
    Candidates are searched by increasing cost: for each choice of paid flips
    the erased part is the solution set of a linear system over GF(2). Raises
    :class:`DecoderFailure` when the cheapest candidates include both logical
    classes.
    """
    s = np.array(list(syndrome), dtype=np.uint8)
    syndrome_int(s)  # validates
    erased = sorted(set(int(e) for e in erasures))
    if any(not 0 <= e < N_QUBITS for e in erased):
        raise ValueError(f"erasure positions must lie in 0..6, got {erased}")
    h = STEANE.parity_check.astype(np.uint8)
    kept = [i for i in range(N_QUBITS) if i not in erased]
    h_e = h[:, erased]
    for cost in range(len(kept) + 1):
        candidates = []
        for paid in itertools.combinations(kept, cost):
            rest = (s + h[:, list(paid)].sum(axis=1)) % 2
            if erased:
                sol = _solve_gf2(h_e, rest)
                if sol is None:
                    continue
                x0, null = sol
                for coeffs in itertools.product((0, 1), repeat=len(null)):
                    x = (x0 + (np.array(coeffs) @ null if len(null) else 0)) % 2
                    e = np.zeros(N_QUBITS, dtype=np.uint8)
                    e[list(paid)] = 1
                    e[erased] = x
                    candidates.append(e)
            elif not rest.any():
                e = np.zeros(N_QUBITS, dtype=np.uint8)
                e[list(paid)] = 1
                candidates.append(e)
        if candidates:
            parities = {int(e.sum()) % 2 for e in candidates}
            if len(parities) > 1:
                raise DecoderFailure(f"syndrome {s.tolist()} with erasures {erased} is ambiguous")
            return min(candidates, key=mask_of)
    raise AssertionError("every syndrome has a correction")  # pragma: no cover


@lru_cache(maxsize=None)
def decode_table() -> np.ndarray:
    """``table[syndrome_int, erasure_mask]`` -> correction mask, or -1 on failure."""
    table = np.empty((1 << N_CHECKS, 1 << N_QUBITS), dtype=np.int16)
    for s in range(1 << N_CHECKS):
        svec = [(s >> 2) & 1, (s >> 1) & 1, s & 1]
        for em in range(1 << N_QUBITS):
            try:
                table[s, em] = mask_of(decode_with_erasures(svec, [i for i in range(N_QUBITS) if em >> i & 1]))
            except DecoderFailure:
                table[s, em] = -1
    table.setflags(write=False)
    return table


SYNDROME_OF_MASK = np.array(
    [np.bitwise_xor.reduce([i + 1 for i in range(N_QUBITS) if m >> i & 1] or [0]) for m in range(1 << N_QUBITS)],
    dtype=np.int16,
)
POPCOUNT = np.array([bin(m).count("1") for m in range(1 << N_QUBITS)], dtype=np.int16)

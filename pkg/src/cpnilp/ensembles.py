"""Seeded random instance families used by the verification harness and the tests."""
from __future__ import annotations

from typing import Iterator

import numpy as np
from scipy.stats import unitary_group

from .cpmap import KrausMap, normalized
from .nilpotency import check_basic_inequalities, synthesize


def compositions(n: int) -> Iterator[tuple]:
    """All ordered tuples of positive integers summing to n."""
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in compositions(n - first):
            yield (first,) + rest


def valid_types(n_max: int, d: int) -> list:
    return [t for n in range(1, n_max + 1) for t in compositions(n) if check_basic_inequalities(t, d)]


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(n, random_state=rng)


def random_type(n: int, d: int, rng: np.random.Generator) -> tuple:
    options = [t for t in compositions(n) if check_basic_inequalities(t, d)]
    return options[int(rng.integers(len(options)))]


def conjugate_by(alpha: KrausMap, U: np.ndarray) -> KrausMap:
    """Kraus operators U L U^*; kernels and flags rotate by U."""
    return KrausMap([U @ L @ U.conj().T for L in alpha.kraus])


def random_nilpotent(rng: np.random.Generator, n_max: int = 6, d_max: int = 3,
                     perturb: bool = False) -> KrausMap:
    """Synthesized map of a random valid type, optionally filled in, then rotated.

    With ``perturb`` the strictly block-triangular entries (w.r.t. the
    synthesized flag) receive random complex values on a random mask; the map
    stays nilpotent but its type and index become generic.
    """
    n = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    t = random_type(n, d, rng)
    ops = [np.array(L) for L in synthesize(t, d).kraus]
    if perturb:
        block = np.repeat(np.arange(len(t)), t)
        allowed = block[:, None] < block[None, :]
        for L in ops:
            G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            L += np.where(allowed & (rng.random((n, n)) < 0.5), G, 0.0)
    return conjugate_by(KrausMap(ops), random_unitary(n, rng))


def random_cp_map(rng: np.random.Generator, n_max: int = 5, d_max: int = 4) -> KrausMap:
    """Generic CP map whose Kraus operators share a random common kernel (possibly {0})."""
    n = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    r = int(rng.integers(0, n + 1))
    U = random_unitary(n, rng)
    P = U[:, :r] @ U[:, :r].conj().T if r else np.zeros((n, n))
    ops = []
    for _ in range(d):
        G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        ops.append(G @ P)
    return KrausMap(ops)


def make_contractive(alpha: KrausMap, rng: np.random.Generator | None = None) -> KrausMap:
    """Scale so that ||α(I)|| = 1 (boundary contractive), or a random factor in [0.5, 1] below it."""
    unit, z = normalized(alpha)
    if z == 0.0 or rng is None:
        return unit
    return unit.scaled(float(rng.uniform(0.5, 1.0)))

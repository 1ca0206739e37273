"""Verification sweeps: round trip, homomorphism and reverse-path agreement.

Work is split into fixed-size chunks; chunk ``j`` of a sampled run draws
from ``random.Random(f"tauplus:{seed}:{j}")``.  Results therefore depend
only on (q, n, seed), never on the number of workers.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .adder import ResidueVector
from .forward import make_fast_forward
from .moduli import make_tau_plus
from .reverse import (STRUCTURAL_MIN_Q, build_bit_matrix, eval_bit_matrix, make_fast_reverse,
                      x_prime, x_prime_eq9)

CHUNK = 50_000
EXHAUSTIVE_CAP = 1 << 24


def chunk_rng(seed: int, j: int) -> random.Random:
    return random.Random(f"tauplus:{seed}:{j}")


@dataclass
class Tally:
    passed: int = 0
    failed: int = 0
    witness: object = None

    def add(self, other: "Tally") -> None:
        self.passed += other.passed
        self.failed += other.failed
        if self.witness is None:
            self.witness = other.witness

    @property
    def total(self) -> int:
        return self.passed + self.failed


@dataclass
class VerifyReport:
    q: int
    mode: str
    checks: dict[str, Tally] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(t.failed == 0 for t in self.checks.values())

    def merge(self, part: dict[str, Tally]) -> None:
        for name, t in part.items():
            self.checks.setdefault(name, Tally()).add(t)

    def __str__(self) -> str:
        lines = [f"q={self.q} mode={self.mode}: {'PASS' if self.ok else 'FAIL'}"]
        for name, t in self.checks.items():
            line = f"  {name}: {t.passed}/{t.total} pass"
            if t.failed:
                line += f" (first failure: {t.witness})"
            lines.append(line)
        return "\n".join(lines)


def roundtrip_values(q: int, xs) -> Tally:
    """forward agrees with direct remainders and reverse inverts it."""
    s = make_tau_plus(q)
    fwd = make_fast_forward(s)
    rev = make_fast_reverse(s)
    m1, m2, m3 = s.moduli
    t = Tally()
    for x in xs:
        r = fwd(x)
        if r == (x % m1, x % m2, x % m3) and rev(*r) == x:
            t.passed += 1
        else:
            t.failed += 1
            if t.witness is None:
                t.witness = x
    return t


def homomorphism_pairs(q: int, pairs) -> Tally:
    s = make_tau_plus(q)
    fwd = make_fast_forward(s)
    m1, m2, m3 = s.moduli
    t = Tally()
    for x, y in pairs:
        a, b = fwd(x), fwd(y)
        summed = ((a[0] + b[0]) % m1, (a[1] + b[1]) % m2, (a[2] + b[2]) % m3)
        if summed == fwd((x + y) % s.dr):
            t.passed += 1
        else:
            t.failed += 1
            if t.witness is None:
                t.witness = (x, y)
    return t


def path_agreement(q: int, triples) -> Tally:
    s = make_tau_plus(q)
    mat = build_bit_matrix(s)
    t = Tally()
    for x1, x2, x3 in triples:
        rv = ResidueVector(q, x1, x2, x3)
        ref = x_prime(rv, s)
        if x_prime_eq9(rv, s) == ref and eval_bit_matrix(mat, rv) == ref:
            t.passed += 1
        else:
            t.failed += 1
            if t.witness is None:
                t.witness = (x1, x2, x3)
    return t


def _exhaustive_chunk(args) -> dict[str, Tally]:
    q, lo, hi = args
    return {"roundtrip": roundtrip_values(q, range(lo, hi))}


def _sample_chunk(args) -> dict[str, Tally]:
    q, seed, j, count, n_paths = args
    s = make_tau_plus(q)
    rng = chunk_rng(seed, j)
    dr = s.dr
    xs = [rng.randrange(dr) for _ in range(count)]
    ys = [rng.randrange(dr) for _ in range(count)]
    out = {
        "roundtrip": roundtrip_values(q, xs),
        "homomorphism": homomorphism_pairs(q, zip(xs, ys)),
    }
    if n_paths:
        triples = [(x % s.m1, x % s.m2, x % s.m3) for x in xs[:n_paths]]
        out["path_agreement"] = path_agreement(q, triples)
    return out


def default_workers() -> int:
    env = os.environ.get("RNS_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def verify_exhaustive(q: int, workers: int | None = None) -> VerifyReport:
    s = make_tau_plus(q)
    if s.dr > EXHAUSTIVE_CAP:
        raise ValueError(f"exhaustive sweep refused: dynamic range {s.dr} exceeds 2^24")
    workers = workers or default_workers()
    tasks = [(q, lo, min(lo + CHUNK, s.dr)) for lo in range(0, s.dr, CHUNK)]
    rep = VerifyReport(q, "exhaustive")
    for part in _run(_exhaustive_chunk, tasks, workers):
        rep.merge(part)
    return rep


def verify_sample(q: int, n: int, seed: int = 0, workers: int | None = None,
                  n_paths: int = 10_000) -> VerifyReport:
    """Sampled sweep of ``n`` values (and ``n`` pairs).

    The reverse-path agreement check runs on the residues of the first
    ``n_paths`` samples overall, and only for q >= 9.
    """
    make_tau_plus(q)
    workers = workers or default_workers()
    if q < STRUCTURAL_MIN_Q:
        n_paths = 0
    tasks = []
    remaining_paths = min(n_paths, n)
    for j, lo in enumerate(range(0, n, CHUNK)):
        count = min(CHUNK, n - lo)
        k = min(count, remaining_paths)
        remaining_paths -= k
        tasks.append((q, seed, j, count, k))
    rep = VerifyReport(q, "sample")
    for part in _run(_sample_chunk, tasks, workers):
        rep.merge(part)
    return rep

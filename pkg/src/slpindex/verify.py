"""Oracle-equivalence and benchmark suites shared by the CLI."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Optional

from .block_index import access_code, access_instrumented, space_report
from .lce_index import LceIndex, lce, lce_instrumented, lce_space_report
from .block_index import report_parts
from .slp import expand_codes, naive_lce


@dataclass
class SuiteResult:
    name: str
    checked: int
    mismatches: int

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def __str__(self) -> str:
        status = "ok" if self.ok else f"FAILED ({self.mismatches} mismatches)"
        return f"{self.name} {self.checked - self.mismatches}/{self.checked} {status}"


def _positions(N: int, exhaustive: int, samples: int, rng: random.Random) -> Iterator[int]:
    if N <= exhaustive:
        return iter(range(N))
    return (rng.randrange(N) for _ in range(samples))


def _pairs(N: int, exhaustive: int, samples: int, rng: random.Random) -> Iterator[tuple[int, int]]:
    if N <= exhaustive:
        return ((i, j) for i in range(N) for j in range(N))
    return ((rng.randrange(N), rng.randrange(N)) for _ in range(samples))


def verify_index(
    lx: LceIndex,
    seed: int = 0,
    access_exhaustive: int = 100_000,
    lce_exhaustive: int = 300,
    samples: int = 10_000,
    text: Optional[list[int]] = None,
) -> list[SuiteResult]:
    """Compare access and lce against brute force over the expanded text."""
    rng = random.Random(seed)
    if text is None:
        text = expand_codes(lx.base.slp).tolist()
    N = len(text)
    checked = bad = 0
    for i in _positions(N, access_exhaustive, samples, rng):
        checked += 1
        bad += access_code(lx.base, i) != text[i]
    results = [SuiteResult("access", checked, bad)]
    checked = bad = 0
    for i, j in _pairs(N, lce_exhaustive, samples, rng):
        checked += 1
        bad += lce(lx, i, j) != naive_lce(text, i, j)
    results.append(SuiteResult("lce", checked, bad))
    return results


def bench_rows(lx: LceIndex, seed: int = 0, queries: int = 10_000) -> list[tuple[str, str, float]]:
    """(kind, name, value) rows: hop statistics, alignment probes and space buckets."""
    rng = random.Random(seed)
    idx = lx.base
    N = idx.N
    rows: list[tuple[str, str, float]] = []
    per_layer: list[list[int]] = [[] for _ in range(idx.k)]
    totals = []
    for _ in range(queries):
        _, hops = access_instrumented(idx, rng.randrange(N))
        totals.append(sum(hops))
        for layer, h in enumerate(hops):
            per_layer[layer].append(h)
    for pos, hs in enumerate(per_layer):
        layer = idx.k - pos
        rows.append(("hops_max", f"layer{layer}", max(hs)))
        rows.append(("hops_mean", f"layer{layer}", sum(hs) / len(hs)))
    rows.append(("hops_max", "total", max(totals)))
    rows.append(("hops_mean", "total", sum(totals) / len(totals)))
    worst_ratio = 0.0
    sparse_used = probes = 0
    for _ in range(queries):
        _, trace = lce_instrumented(lx, rng.randrange(N), rng.randrange(N))
        for probe in trace:
            probes += 1
            sparse_used += probe.sparse
            worst_ratio = max(worst_ratio, probe.compared / probe.tau)
    rows.append(("lce_probes", "count", probes))
    rows.append(("lce_probes", "sparse_lookups", sparse_used))
    rows.append(("lce_probes", "max_compared_over_tau", worst_ratio))
    ra = space_report(idx)
    for name, value in report_parts(ra).items():
        rows.append(("bytes", name, value))
    rows.append(("bytes", "access_total", ra["total"]))
    full = lce_space_report(lx)
    for name, value in full["extra"].items():
        rows.append(("bytes", name, value))
    rows.append(("bytes", "total", full["total"]))
    for li, dec in enumerate(idx.layers, 1):
        rows.append(("layer", f"layer{li}.X", dec.X))
        rows.append(("layer", f"layer{li}.m", dec.m))
        rows.append(("layer", f"layer{li}.d", dec.d))
        rows.append(("layer", f"layer{li}.k_max", dec.k_max))
    return rows

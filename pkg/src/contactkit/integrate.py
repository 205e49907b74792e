"""Integration of scalar fields against the contact volume form.

Two engines share one entry point.  Flat periodic charts use a product
trapezoid rule, which is exact to roundoff once the per-axis node count
exceeds the trigonometric bandwidth of the integrand.  Constraint
manifolds use scrambled-Sobol sampling of a reference measure with
explicit density weights; the reported standard error is the sample
standard deviation over sqrt(N), a conservative figure for quasi-random
points.

Evaluation is chunked, optionally across a thread pool
(``CONTACTKIT_THREADS``); partial sums are combined in index order with
compensated summation, so results are bit-identical for any thread
count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fields import ScalarField
from .manifold import ContactManifold, GeometryError

_CHUNK = 1 << 16


@dataclass(frozen=True)
class IntegralResult:
    value: float
    std_error: float
    method: str
    samples: int
    seed: Optional[int]

    def record(self, operation: str, inputs: dict) -> dict:
        """Flat dictionary for JSON export."""
        return {
            "operation": operation,
            "inputs": inputs,
            "value": self.value,
            "std_error": self.std_error,
            "method": self.method,
            "samples": self.samples,
            "seed": self.seed,
        }


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("CONTACTKIT_THREADS", "1")))
    except ValueError:
        return 1


def _chunk_stats(vals: np.ndarray):
    return (math.fsum(vals), math.fsum(vals * vals), vals.size)


def integrate(m: ContactManifold, f: ScalarField, budget: int = 1 << 17,
              seed: int = 0, nodes: Optional[int] = None,
              threads: Optional[int] = None) -> IntegralResult:
    """Integral of f against alpha ^ (d alpha)^n over the manifold.

    budget is the total evaluation count; for periodic charts it is
    turned into a per-axis node count unless nodes is given, for
    sampling engines it is rounded up to a power of two.
    """
    if m.periodic:
        return _integrate_grid(m, f, budget, nodes, threads)
    if m.reference_sampler is None:
        raise GeometryError(f"{m.name} has no reference sampler for integration")
    return _integrate_sampled(m, f, budget, seed, threads)


def _eval_chunks(pts: np.ndarray, weights, m: ContactManifold, f: ScalarField,
                 threads: Optional[int]):
    """Ordered per-chunk compensated sums of f * defect * weight."""
    nthreads = default_threads() if threads is None else max(1, int(threads))
    chunks = [slice(i, min(i + _CHUNK, pts.shape[0])) for i in range(0, pts.shape[0], _CHUNK)]

    def work(sl):
        block = pts[sl]
        vals = np.asarray(f(block), dtype=float) * m.contact_defect(block)
        if weights is not None:
            vals = vals * weights[sl]
        return _chunk_stats(vals)

    if nthreads == 1 or len(chunks) == 1:
        stats = [work(sl) for sl in chunks]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            stats = list(pool.map(work, chunks))
    total = math.fsum(s[0] for s in stats)
    total_sq = math.fsum(s[1] for s in stats)
    count = sum(s[2] for s in stats)
    return total, total_sq, count


def _integrate_grid(m: ContactManifold, f: ScalarField, budget: int,
                    nodes: Optional[int], threads: Optional[int]) -> IntegralResult:
    d = m.ambient_dim
    if nodes is None:
        nodes = max(9, int(round(budget ** (1.0 / d))))
    ticks = np.arange(nodes) * (m.period / nodes)
    grids = np.meshgrid(*([ticks] * d), indexing="ij")
    pts = np.column_stack([g.ravel() for g in grids])
    total, _, count = _eval_chunks(pts, None, m, f, threads)
    cell = (m.period / nodes) ** d
    return IntegralResult(value=cell * total, std_error=0.0,
                          method="quadrature", samples=count, seed=None)


def _integrate_sampled(m: ContactManifold, f: ScalarField, budget: int,
                       seed: int, threads: Optional[int]) -> IntegralResult:
    count = 1 << max(8, math.ceil(math.log2(max(2, budget))))
    pts, weights, total_measure = m.reference_sampler(m, count, seed)
    total, total_sq, n = _eval_chunks(pts, weights, m, f, threads)
    mean = total / n
    var = max(0.0, total_sq / n - mean * mean)
    std_err = total_measure * math.sqrt(var / n)
    return IntegralResult(value=total_measure * mean, std_error=std_err,
                          method="monte-carlo", samples=n, seed=seed)


def contact_volume(m: ContactManifold, budget: int = 1 << 17, seed: int = 0,
                   nodes: Optional[int] = None,
                   threads: Optional[int] = None) -> IntegralResult:
    """Total contact volume: the integral of 1."""
    from .fields import constant_field
    return integrate(m, constant_field(1.0, m.ambient_dim), budget=budget,
                     seed=seed, nodes=nodes, threads=threads)

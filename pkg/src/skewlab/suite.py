"""Parallel execution of independent verifier jobs.

Jobs share no mutable state (SkewStates are value-semantic), so a thread
pool is enough; the heavy work happens inside LAPACK calls that release the
GIL.  A failing job becomes an error entry in its own report and never
aborts a sibling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .verifiers import VerifierReport, run_verifier

WORKERS_ENV = "SKEWLAB_WORKERS"


def worker_count(n_jobs: int | None = None) -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        k = int(raw)
    except ValueError:
        k = 0
    if k < 1:
        k = min(4, os.cpu_count() or 1)
    if n_jobs is not None:
        k = min(k, max(1, n_jobs))
    return k


def run_suite(jobs: list[tuple[str, object, str]],
              workers: int | None = None) -> list[VerifierReport]:
    """Run (name, thunk, reference) verifier jobs, preserving input order."""
    if not jobs:
        return []
    k = workers if workers else worker_count(len(jobs))
    if k == 1:
        return [run_verifier(n, f, reference=r) for n, f, r in jobs]
    with ThreadPoolExecutor(max_workers=k) as pool:
        futs = [pool.submit(run_verifier, n, f, reference=r) for n, f, r in jobs]
        return [f.result() for f in futs]

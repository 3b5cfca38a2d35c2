"""Helpers shared by test modules; conftest itself is never imported directly."""
from longmem.sim import make_rng, standard_normal

# criterion -> summary line, read back by the terminal-summary hook
ACCEPTANCE = {}


def gaussian(seed, n):
    return standard_normal(make_rng(seed), n)


def record(criterion, ok, detail):
    """Store and print one acceptance line; ``ok`` is the pass/fail verdict."""
    line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return ok

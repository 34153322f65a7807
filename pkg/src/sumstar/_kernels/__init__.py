"""Kernel selection: compiled extension when importable, pure twin otherwise.

Two kernel families live behind this facade: bytecode program
evaluation over integer boxes (:class:`Evaluator`), and the completion
search for generators of homogeneous linear systems
(:func:`completion`).

Set ``SUMSTAR_PURE=1`` in the environment to force the pure backend even
when the extension built.  Dispatch is also per-call: an input whose
intermediate values could overflow the compiled kernel's fixed-width
arithmetic silently falls back to the pure twin, which computes with
unbounded integers.
"""

from __future__ import annotations

import os
from array import array
from typing import Optional, Sequence

from ..bytecode import Program, stack_need, value_bound
from . import pure

try:
    from . import _accel
except ImportError:  # extension not built; everything still works
    _accel = None

_FORCE_PURE = bool(os.environ.get("SUMSTAR_PURE"))

_SAFE = 1 << 62
_MAX_VARS = 32
_MAX_STACK = 120


def backend_name() -> str:
    return "pure" if (_accel is None or _FORCE_PURE) else "compiled"


def _flatten(code: Sequence[tuple[int, int]]) -> array:
    flat = array("q")
    for op, arg in code:
        flat.append(op)
        flat.append(arg)
    return flat


class Evaluator:
    """A compiled formula bound to the fastest safe backend."""

    def __init__(self, program: Program):
        self.program = program
        self._flat: Optional[array] = None
        self._shape_ok = (
            stack_need(program) <= _MAX_STACK and len(program.var_names) <= _MAX_VARS
        )

    def _accel_ok(self, highs: Sequence[int]) -> bool:
        if _accel is None or _FORCE_PURE or not self._shape_ok:
            return False
        return value_bound(self.program, list(highs)) < _SAFE

    def _flat_code(self) -> array:
        if self._flat is None:
            self._flat = _flatten(self.program.code)
        return self._flat

    def run(self, env: Sequence[int]) -> bool:
        if self._accel_ok([abs(v) for v in env]):
            return bool(_accel.run_program(self._flat_code(), array("q", env)))
        return bool(pure.run_program(self.program.code, env))

    def search(self, lows: Sequence[int], highs: Sequence[int]) -> Optional[tuple[int, ...]]:
        """First satisfying tuple of the box, in lexicographic order."""

        if any(lo > hi for lo, hi in zip(lows, highs)):
            return None
        if self._accel_ok(highs):
            return _accel.search_product(
                self._flat_code(), array("q", lows), array("q", highs)
            )
        return pure.search_product(self.program.code, lows, highs)

    def count(self, lows: Sequence[int], highs: Sequence[int]) -> int:
        if any(lo > hi for lo, hi in zip(lows, highs)):
            return 0
        if self._accel_ok(highs):
            return _accel.count_sat(self._flat_code(), array("q", lows), array("q", highs))
        return pure.count_sat(self.program.code, lows, highs)


def first_diff(
    a: Evaluator, b: Evaluator, lows: Sequence[int], highs: Sequence[int]
) -> Optional[tuple[int, ...]]:
    """First box point where the two programs disagree as booleans."""

    if any(lo > hi for lo, hi in zip(lows, highs)):
        return None
    if a._accel_ok(highs) and b._accel_ok(highs):
        return _accel.first_diff(
            a._flat_code(), b._flat_code(), array("q", lows), array("q", highs)
        )
    return pure.first_diff(a.program.code, b.program.code, lows, highs)


# Interval propagation is safe in fixed-width arithmetic when every
# row's largest possible partial sum stays well under 62 bits; the
# caller computes that ceiling from its system and box.
_PROPAGATE_SAFE = 1 << 60


def propagate_kernel(worst: int):
    """Interval-propagation callable for a given magnitude ceiling.

    Returns ``(fn, wants_arrays)``: the compiled kernel (which requires
    ``array('q')`` buffers) when it is available and ``worst`` is safe
    for 64-bit arithmetic, otherwise the pure twin (which accepts any
    mutable sequences and computes with unbounded integers).
    """

    if _accel is not None and not _FORCE_PURE and worst < _PROPAGATE_SAFE:
        return _accel.propagate, True
    return pure.propagate, False


# With coefficients below 2**15, at most 64 rows and columns, and at
# most 2**24 search nodes, every defect entry stays under 2**39 and
# every dot product under 2**61, so the compiled kernel's long long
# arithmetic cannot overflow.
_COMPLETION_MAX_COEFF = 1 << 15
_COMPLETION_MAX_DIM = 64
_COMPLETION_MAX_NODES = 1 << 24


def completion(
    rows: Sequence[tuple[int, ...]], n: int, node_cap: int
) -> list[tuple[int, ...]]:
    """Minimal nonzero natural solutions of the homogeneous system
    ``row . x = 0``, through whichever backend is safe for the input."""

    rows = [tuple(row) for row in rows]
    if (
        _accel is not None
        and not _FORCE_PURE
        and n <= _COMPLETION_MAX_DIM
        and len(rows) <= _COMPLETION_MAX_DIM
        and node_cap <= _COMPLETION_MAX_NODES
        and all(abs(c) < _COMPLETION_MAX_COEFF for row in rows for c in row)
    ):
        return _accel.completion(rows, n, node_cap)
    return pure.completion(rows, n, node_cap)

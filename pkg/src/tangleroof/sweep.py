"""Parameter sweeps over the model, one record per grid point."""
from __future__ import annotations

import ast
import csv
import io
import itertools
import math
import operator
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ghz import lower_bound
from .roof import fmt, compute_profile, roof_value
from .spin_model import ModelParams, model_mixture

CSV_HEADER = ("gamma", "h", "alpha", "site", "boundary", "p_model", "class",
              "sqrt_tau3", "ghz_lb", "span_lo", "span_hi", "flags")
THREADS_ENV = "TANGLEROOF_THREADS"


class NumericalFailure(RuntimeError):
    """A grid point could not be evaluated; carries the offending parameters."""

    def __init__(self, params, cause):
        super().__init__(f"{params}: {type(cause).__name__}: {cause}")
        self.params = params
        self.cause = cause


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.USub: operator.neg, ast.UAdd: operator.pos,
        ast.Pow: operator.pow}


def parse_number(text: str) -> float:
    """Evaluate a small arithmetic expression such as ``pi/2`` or ``0.03*pi``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        return ev(ast.parse(str(text).strip(), mode="eval"))
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}") from exc


def parse_range(text) -> np.ndarray:
    """``"x"`` -> [x]; ``"a:b:n"`` -> n points from a to b inclusive."""
    if isinstance(text, (int, float)):
        return np.array([float(text)])
    parts = str(text).split(":")
    if len(parts) == 1:
        return np.array([parse_number(parts[0])])
    if len(parts) != 3:
        raise ValueError(f"range must be 'start:stop:count', got {text!r}")
    a, b = parse_number(parts[0]), parse_number(parts[1])
    n = int(parse_number(parts[2]))
    if n < 1:
        raise ValueError("range count must be positive")
    return np.linspace(a, b, n)


@dataclass(frozen=True)
class SweepRecord:
    gamma: float
    h: float
    alpha: float
    site: int
    boundary: str
    p_model: float
    polytope_class: str
    sqrt_tau3: float
    ghz_lb: float
    axis_span: tuple | None
    flags: str

    def row(self):
        lo, hi = self.axis_span if self.axis_span is not None else ("", "")
        return [fmt(self.gamma), fmt(self.h), fmt(self.alpha), str(self.site), self.boundary,
                fmt(self.p_model), self.polytope_class, fmt(self.sqrt_tau3), fmt(self.ghz_lb),
                fmt(lo) if lo != "" else "", fmt(hi) if hi != "" else "", self.flags]


def evaluate_point(params: ModelParams, site: int = 0, grid: int = 2001,
                   with_bound: bool = True, seed: int = 0) -> SweepRecord:
    try:
        mix, gs = model_mixture(params, site)
        prof = compute_profile(mix, grid=grid)
        value = roof_value(prof, mix.p_model)
        lb = lower_bound(mix, seed=seed) if with_bound else 0.0
    except (ArithmeticError, RuntimeError, ValueError, np.linalg.LinAlgError) as exc:
        raise NumericalFailure(params, exc) from exc
    flags = []
    if gs.degenerate:
        flags.append("degenerate")
    if lb > value + 1e-9:
        flags.append("bound_above_roof")
    value = min(max(value, 0.0), 1.0)
    return SweepRecord(params.gamma, params.h, params.alpha, site, params.boundary,
                       mix.p_model, prof.label, value, lb, prof.axis_span, ";".join(flags))


def thread_count(threads: int | None) -> int:
    if threads:
        return max(1, int(threads))
    env = os.environ.get(THREADS_ENV)
    return max(1, int(env)) if env else 1


def run_sweep(gammas, hs, alphas, site=0, boundary="periodic", L=4, grid=2001,
              threads=None, with_bound=True, seed=0):
    """Records in lexicographic (gamma, h, alpha) order, independent of threads."""
    points = [ModelParams(float(g), float(h), float(a), L, boundary)
              for g, h, a in itertools.product(gammas, hs, alphas)]
    work = lambda p: evaluate_point(p, site, grid, with_bound, seed)
    n = thread_count(threads)
    if n == 1:
        return [work(p) for p in points]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(work, points))


def records_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()

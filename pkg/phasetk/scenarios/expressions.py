"""Arithmetic expressions for scenario-defined Hamiltonians, potentials and curves.

Expressions use +, -, *, /, ^ (or **), parentheses, numbers, the functions
sin, cos, exp, sqrt, log and the constant pi. Variables are x1..xn, p1..pn
(also x_1, p_1, ...; plain x and p when n = 1), t for time and theta1..thetan
for manifold parameters. Derivatives are taken symbolically and compiled to
numpy with ``lambdify``.
"""

from __future__ import annotations

import re
from typing import Callable, Sequence

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from phasetk.core.exceptions import ScenarioValidationError
from phasetk.dynamics.curves import CurveSpec
from phasetk.dynamics.hamiltonian import Hamiltonian
from phasetk.manifolds.base import ExactManifold, ParamManifold

_ALLOWED_CHARS = re.compile(r"^[0-9A-Za-z_+\-*/^().\s]*$")
_FUNCTIONS = {"sin": sp.sin, "cos": sp.cos, "exp": sp.exp, "sqrt": sp.sqrt, "log": sp.log, "pi": sp.pi}
_GLOBALS = {"Integer": sp.Integer, "Float": sp.Float, "Rational": sp.Rational, "Symbol": sp.Symbol}
_TRANSFORMATIONS = standard_transformations + (convert_xor,)


def _aliases(prefix: str, symbols: Sequence[sp.Symbol]) -> dict[str, sp.Symbol]:
    table = {}
    for index, symbol in enumerate(symbols, start=1):
        table[f"{prefix}{index}"] = symbol
        table[f"{prefix}_{index}"] = symbol
    if len(symbols) == 1:
        table[prefix] = symbols[0]
    return table


def parse(expression: str, variables: dict[str, sp.Symbol], field: str = "expression") -> sp.Expr:
    """Parse ``expression`` allowing only the grammar's functions and ``variables``."""

    if not isinstance(expression, str) or not expression.strip():
        raise ScenarioValidationError("expression must be a non-empty string", details={"field": field})
    if not _ALLOWED_CHARS.match(expression) or "__" in expression:
        raise ScenarioValidationError(
            "expression contains characters outside the arithmetic grammar",
            details={"field": field, "expression": expression},
        )
    local = {**_FUNCTIONS, **variables}
    try:
        parsed = parse_expr(expression, local_dict=local, global_dict=dict(_GLOBALS), transformations=_TRANSFORMATIONS)
    except (SyntaxError, TypeError, ValueError, NameError) as exc:
        raise ScenarioValidationError(
            f"cannot parse expression: {exc}", details={"field": field, "expression": expression}
        ) from exc
    if not isinstance(parsed, sp.Expr):
        raise ScenarioValidationError("expression must be arithmetic", details={"field": field})
    unknown = sorted(str(symbol) for symbol in parsed.free_symbols - set(variables.values()))
    if unknown:
        raise ScenarioValidationError(
            f"unknown variables in expression: {', '.join(unknown)}",
            details={"field": field, "expression": expression},
        )
    return parsed


def _compile(expr: sp.Expr, args: Sequence[sp.Symbol]) -> Callable[..., np.ndarray]:
    return sp.lambdify(tuple(args), expr, "numpy")


def phase_symbols(n: int) -> tuple[list[sp.Symbol], list[sp.Symbol], sp.Symbol]:
    xs = list(sp.symbols(f"x1:{n + 1}", real=True))
    ps = list(sp.symbols(f"p1:{n + 1}", real=True))
    return xs, ps, sp.Symbol("t", real=True)


def compile_hamiltonian(
    expression: str, n: int, name: str = "expression", field: str = "hamiltonian.expression"
) -> Hamiltonian:
    """Hamiltonian from an expression in x, p and t with symbolic derivatives."""

    xs, ps, t = phase_symbols(n)
    variables = {**_aliases("x", xs), **_aliases("p", ps), "t": t}
    expr = parse(expression, variables, field)
    coords = xs + ps
    args = coords + [t]

    value_fn = _compile(expr, args)
    gradient_exprs = [sp.diff(expr, c) for c in coords]
    gradient_fns = [_compile(g, args) for g in gradient_exprs]
    hessian_fns = [[_compile(sp.diff(g, c), args) for c in coords] for g in gradient_exprs]

    def unpack(z: np.ndarray, time: float) -> list:
        return [z[..., k] for k in range(2 * n)] + [time]

    def H(z, time):
        return np.broadcast_to(np.asarray(value_fn(*unpack(z, time)), dtype=float), z.shape[:-1])

    def grad(z, time):
        values = unpack(z, time)
        return np.stack(
            [np.broadcast_to(np.asarray(f(*values), dtype=float), z.shape[:-1]) for f in gradient_fns], axis=-1
        )

    def hess(z, time):
        values = unpack(z, time)
        rows = [
            np.stack([np.broadcast_to(np.asarray(f(*values), dtype=float), z.shape[:-1]) for f in row], axis=-1)
            for row in hessian_fns
        ]
        return np.stack(rows, axis=-2)

    separable = all(sp.simplify(sp.diff(expr, xi, pj)) == 0 for xi in xs for pj in ps)
    homogeneous = False
    if t not in expr.free_symbols and expr.is_polynomial(*coords):
        poly = sp.Poly(expr, *coords)
        homogeneous = poly.is_homogeneous and poly.total_degree() == 2

    return Hamiltonian(
        n,
        H,
        grad,
        hess,
        time_independent=t not in expr.free_symbols,
        quadratic_homogeneous=bool(homogeneous),
        separable=bool(separable),
        name=name,
    )


def compile_potential(
    expression: str, n: int, field: str = "manifold.potential", **kwargs
) -> ExactManifold:
    """Exact manifold p = ∇Φ(x) from an expression for Φ in x1..xn."""

    xs, _, _ = phase_symbols(n)
    expr = parse(expression, _aliases("x", xs), field)
    value_fn = _compile(expr, xs)
    gradient_fns = [_compile(sp.diff(expr, xi), xs) for xi in xs]

    def phi(points: np.ndarray) -> np.ndarray:
        columns = [points[:, k] for k in range(n)]
        return np.broadcast_to(np.asarray(value_fn(*columns), dtype=float), points.shape[:1])

    def grad(points: np.ndarray) -> np.ndarray:
        columns = [points[:, k] for k in range(n)]
        return np.stack(
            [np.broadcast_to(np.asarray(f(*columns), dtype=float), points.shape[:1]) for f in gradient_fns], axis=-1
        )

    kwargs.setdefault("name", "expression")
    return ExactManifold(n, phi, grad, vectorized=True, **kwargs)


def compile_embedding(
    components: Sequence[str], n: int, periodic: Sequence[bool], field: str = "manifold.embedding", **kwargs
) -> ParamManifold:
    """Parametrized manifold θ ↦ (x(θ), p(θ)) from 2n component expressions."""

    if len(components) != 2 * n:
        raise ScenarioValidationError(
            "embedding needs 2n component expressions", details={"field": field, "count": len(components), "n": n}
        )
    thetas = list(sp.symbols(f"theta1:{n + 1}", real=True))
    variables = _aliases("theta", thetas)
    exprs = [parse(text, variables, f"{field}[{k}]") for k, text in enumerate(components)]
    value_fns = [_compile(e, thetas) for e in exprs]
    tangent_fns = [[_compile(sp.diff(e, th), thetas) for th in thetas] for e in exprs]

    def psi(params: np.ndarray) -> np.ndarray:
        columns = [params[:, k] for k in range(n)]
        return np.stack(
            [np.broadcast_to(np.asarray(f(*columns), dtype=float), params.shape[:1]) for f in value_fns], axis=-1
        )

    def tangent(params: np.ndarray, directions: np.ndarray) -> np.ndarray:
        columns = [params[:, k] for k in range(n)]
        out = np.zeros((params.shape[0], 2 * n))
        for row, fns in enumerate(tangent_fns):
            for k, f in enumerate(fns):
                partial = np.broadcast_to(np.asarray(f(*columns), dtype=float), params.shape[:1])
                out[:, row] += partial * directions[:, k]
        return out

    kwargs.setdefault("name", "expression")
    return ParamManifold(n, psi, periodic, tangent=tangent, **kwargs)


def compile_curve(components: Sequence[str], n: int, field: str = "curve.components") -> CurveSpec:
    """Curve s ↦ γ(s) from 2n component expressions in t."""

    if len(components) != 2 * n:
        raise ScenarioValidationError(
            "curve needs 2n component expressions", details={"field": field, "count": len(components), "n": n}
        )
    t = sp.Symbol("t", real=True)
    exprs = [parse(text, {"t": t}, f"{field}[{k}]") for k, text in enumerate(components)]
    value_fns = [_compile(e, [t]) for e in exprs]
    rate_fns = [_compile(sp.diff(e, t), [t]) for e in exprs]

    def stack(fns: list, s: np.ndarray) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.stack([np.broadcast_to(np.asarray(f(s), dtype=float), s.shape) for f in fns], axis=-1)

    return CurveSpec(n, lambda s: stack(value_fns, s), lambda s: stack(rate_fns, s), name="expression")


__all__ = ["parse", "phase_symbols", "compile_hamiltonian", "compile_potential", "compile_embedding", "compile_curve"]

"""The built-in integrand corpus and corpus-file round trip.

Corpus files are JSON arrays of function documents (form tag plus exact
rational parameters).  The built-in default covers every supported class:
sign-flipping steps, monotone smooth vectors, sign-changing polynomials,
finite a.e. modifications, and the escaping-block family.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import List

from .errors import ConfigError
from .functions import (
    AeModifiedFunction,
    LatticeFunction,
    PiecewiseFunction,
    StepFunction,
    TrigExpr,
    escaping_function,
    function_from_json,
    poly,
)
from .lattice import LatticeVector

F = Fraction


def _vec(*xs) -> LatticeVector:
    return LatticeVector([F(x) for x in xs])


def default_corpus() -> List[LatticeFunction]:
    step_pm = StepFunction(
        (0, F(1, 4), F(1, 2), F(3, 4), 1),
        [_vec(2), _vec(-1), _vec(3), _vec(-2)],
        name="step_pm",
    )
    step_2d = StepFunction(
        (0, F(1, 3), F(2, 3), 1),
        [_vec(2, 0), _vec(0, 3), _vec(-1, 1)],
        name="step_2d",
    )
    mono_linear = PiecewiseFunction.smooth("mono_linear", [poly(0, 1)], monotone=True)
    mono_vec3 = PiecewiseFunction.smooth(
        "mono_vec3",
        [poly(0, 1), poly(0, 0, 1), TrigExpr("cos", 1.0, -1.0, 1.0)],
        monotone=True,
    )
    poly_signflip = PiecewiseFunction.smooth("poly_signflip", [poly(F(-1, 2), 1)])
    poly_parabola = PiecewiseFunction.smooth("poly_parabola", [poly(F(2, 9), -1, 1)])
    poly_cubic = PiecewiseFunction.smooth(
        "poly_cubic", [poly(F(-1, 8), F(3, 4), F(-3, 2), 1)]
    )
    poly_pair_2d = PiecewiseFunction.smooth(
        "poly_pair_2d", [poly(F(-1, 2), 1), poly(F(3, 16), -1, 1)]
    )
    pw_vee = PiecewiseFunction(
        (0, F(1, 2), 1),
        [(poly(F(-1, 4), 1),), (poly(F(3, 4), -1),)],
        name="pw_vee",
    )
    smooth_sin = PiecewiseFunction.smooth(
        "smooth_sin", [TrigExpr("sin", 0.0, 1.0, math.pi)]
    )
    ae_spike = AeModifiedFunction(
        StepFunction((0, 1), [_vec(0)], name="zero_base"),
        [(F(1, 2), _vec(5))],
        name="ae_spike",
    )
    ae_step3 = AeModifiedFunction(
        step_2d,
        [(F(1, 5), _vec(100, 100)), (F(1, 2), _vec(100, 100)), (F(4, 5), _vec(100, 100))],
        name="ae_step3",
    )
    ae_flip = AeModifiedFunction(
        StepFunction((0, 1), [_vec(-50)], name="low_base"),
        [(F(2, 5), _vec(50))],
        name="ae_flip",
    )
    return [
        step_pm,
        step_2d,
        mono_linear,
        mono_vec3,
        poly_signflip,
        poly_parabola,
        poly_cubic,
        poly_pair_2d,
        pw_vee,
        smooth_sin,
        ae_spike,
        ae_step3,
        ae_flip,
        escaping_function(4),
    ]


def sign_changing_corpus() -> List[LatticeFunction]:
    """The piecewise-polynomial integrands with sign changes (the modulus
    identity's natural test set)."""
    return [
        f for f in default_corpus()
        if f.name in ("poly_signflip", "poly_parabola", "poly_cubic", "poly_pair_2d", "pw_vee")
    ]


def dump_corpus(corpus: List[LatticeFunction], path: str) -> None:
    with open(path, "w") as out:
        json.dump([f.to_json() for f in corpus], out, indent=2, sort_keys=True)
        out.write("\n")


def load_corpus(path: str) -> List[LatticeFunction]:
    try:
        with open(path) as src:
            data = json.load(src)
    except OSError as exc:
        raise ConfigError(f"cannot read corpus file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"corpus file {path} is not valid JSON: line {exc.lineno}, "
            f"column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, list):
        raise ConfigError(f"corpus file {path}: expected a JSON array of functions")
    out = []
    seen = set()
    for i, doc in enumerate(data):
        try:
            f = function_from_json(doc)
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"corpus file {path}: entry {i}: {exc}") from exc
        if f.name in seen:
            raise ConfigError(f"corpus file {path}: duplicate function id {f.name!r}")
        seen.add(f.name)
        out.append(f)
    return out


def resolve_corpus(spec: str) -> List[LatticeFunction]:
    """'builtin:default', 'builtin:sign_changing', or a JSON file path."""
    if spec in ("builtin:default", "", None):
        return default_corpus()
    if spec == "builtin:sign_changing":
        return sign_changing_corpus()
    return load_corpus(spec)

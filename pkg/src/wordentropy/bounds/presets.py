"""Named bounds and the textual front door :func:`parse_bound`.

Accepted forms::

    <expr>                              closed form in n, e.g. ceil(3^(n/2))
    preset:<name>[(arg, key=value, ...)]
    table:v0,v1,...[;tail=<expr>][;monotone][;tail-monotone]
    rec:f0,...,f(d-1);c1,...,cd         f(n) = c1 f(n-1) + ... + cd f(n-d)
    min:<spec> | <spec> [| ...]

Preset arguments are closed expressions, so ``h=log(3/2)`` is exact.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from . import expr as E
from .reals import compare
from .spec import AnalyticE0, BoundSpec, ExprBound, MinBound, RecurrenceBound, TableBound


def _split_top(text: str, sep: str) -> List[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def _subst(node: E.Node, env: Dict[str, E.Node]) -> E.Node:
    """Replace named placeholders (``Var`` nodes with other names)."""
    if isinstance(node, E.Var):
        return env.get(node.name, node) if node.name != "n" else node
    if isinstance(node, E.Neg):
        return E.Neg(_subst(node.arg, env))
    if isinstance(node, E.Bin):
        return E.Bin(node.op, _subst(node.left, env), _subst(node.right, env))
    if isinstance(node, E.Call):
        return E.Call(node.name, tuple(_subst(a, env) for a in node.args))
    return node


def _template(text: str, **params: E.Node) -> E.Node:
    """Parse ``text`` with the keyword names as parameter slots, then fill them."""
    return _subst(E.parse_expr(text, names=params), params)


def _const(value: E.Node) -> Fraction:
    v = E.evaluate(value)
    if not isinstance(v, Fraction):
        raise ValueError("parameter must be an exact rational here")
    return v


# -- preset builders ----------------------------------------------------------


def golden() -> BoundSpec:
    """``ceil(3^(n/2))``; E0 is exactly log(3)/2."""
    node = E.parse_expr("ceil(3^(n/2))")
    rate = E.r_div(E.r_log(Fraction(3)), Fraction(2))
    return ExprBound(node, name="golden", monotone=True,
                     e0=AnalyticE0(rate, rate, "log(3)/2", "preset closed form"),
                     source="preset:golden")


def cassaigne() -> BoundSpec:
    """``f(n) = f(n-1) + 3 f(n-3)`` from 1, 2, 4."""
    return RecurrenceBound([1, 2, 4], [1, 0, 3], name="cassaigne", source="preset:cassaigne")


def theta_staircase(q: E.Node, theta: E.Node, n0: E.Node) -> BoundSpec:
    """``f(0)=1``, ``f(n) = n+q-1`` for ``1 <= n <= n0``, ``f(n) = theta^n`` beyond."""
    qv, n0v = _const(q), _const(n0)
    if qv.denominator != 1 or n0v.denominator != 1 or qv < 2 or n0v < 1:
        raise ValueError("theta-staircase needs integers q >= 2 and n0 >= 1")
    qi, n0i = int(qv), int(n0v)
    tv = E.evaluate(theta)
    if compare(tv, Fraction(1)) <= 0 or compare(tv, qv) > 0:
        raise ValueError("theta-staircase needs 1 < theta <= q")
    tail = ExprBound(E.Bin("^", theta, E.Var()), monotone=True)
    values = [1] + [n + qi - 1 for n in range(1, n0i + 1)]
    jump = E.r_pow(tv, Fraction(n0i + 1))
    monotone = compare(jump, Fraction(n0i + qi - 1)) >= 0
    src = f"preset:theta-staircase(q={qi},theta={E.to_text(theta)},n0={n0i})"
    return TableBound(values, tail, monotone=monotone, name="theta-staircase", source=src)


def prop6_envelope(c: E.Node) -> BoundSpec:
    """``max(n+1, exp(c n))``."""
    node = _template("max(n + 1, exp(c * n))", c=c)
    return ExprBound(node, name="prop6-envelope", monotone=True,
                     source=f"preset:prop6-envelope(c={E.to_text(c)})")


def exp_order(h: E.Node, C: E.Node) -> BoundSpec:
    """``C * exp(h n)``: the upper envelope of the exponential-order word."""
    node = _template("C * exp(h * n)", h=h, C=C)
    return ExprBound(node, name="exp-order", monotone=True,
                     source=f"preset:exp-order(h={E.to_text(h)},C={E.to_text(C)})")


PRESETS: Dict[str, Tuple[Callable[..., BoundSpec], Tuple[str, ...], Dict[str, str]]] = {
    "golden": (golden, (), {}),
    "cassaigne": (cassaigne, (), {}),
    "theta-staircase": (theta_staircase, ("q", "theta", "n0"), {"q": "2", "theta": "2", "n0": "4"}),
    "prop6-envelope": (prop6_envelope, ("c",), {"c": "0.3"}),
    "exp-order": (exp_order, ("h", "C"), {"h": "log(2)", "C": "1"}),
}


def preset(name: str, *args, **kwargs) -> BoundSpec:
    """Build a preset; arguments may be numbers or expression strings."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")
    fn, params, defaults = PRESETS[name]
    if len(args) > len(params):
        raise ValueError(f"preset {name} takes at most {len(params)} arguments")
    vals: Dict[str, object] = dict(defaults)
    vals.update(zip(params, args))
    for k, v in kwargs.items():
        if k not in params:
            raise ValueError(f"preset {name} has no parameter {k!r}")
        vals[k] = v
    nodes = {k: E.const_node(v if not isinstance(v, float) else repr(v)) for k, v in vals.items()}
    return fn(**{k: nodes[k] for k in params})


def _parse_preset(body: str) -> BoundSpec:
    body = body.strip()
    if "(" in body:
        if not body.endswith(")"):
            raise E.BoundSyntaxError("unterminated preset arguments", len(body))
        name, inner = body[: body.index("(")].strip(), body[body.index("(") + 1 : -1]
        args, kwargs = [], {}
        if inner.strip():
            for part in _split_top(inner, ","):
                if "=" in part:
                    k, v = part.split("=", 1)
                    kwargs[k.strip()] = v.strip()
                else:
                    args.append(part)
        return preset(name, *args, **kwargs)
    return preset(body)


def _parse_table(body: str) -> BoundSpec:
    parts = [p.strip() for p in body.split(";")]
    values = [Fraction(v) for v in _split_top(parts[0], ",") if v]
    tail = None
    monotone = None
    tail_monotone = False
    for opt in parts[1:]:
        if opt.startswith("tail="):
            tail = parse_bound(opt[5:])
        elif opt == "monotone":
            monotone = True
        elif opt == "tail-monotone":
            tail_monotone = True
        elif opt:
            raise E.BoundSyntaxError(f"unknown table option {opt!r}", 0)
    if tail is not None and tail_monotone:
        tail.monotone = True
    return TableBound(values, tail, monotone=monotone)


def _parse_rec(body: str) -> BoundSpec:
    parts = body.split(";")
    if len(parts) != 2:
        raise E.BoundSyntaxError("recurrence needs 'initial;coefficients'", 0)
    init = [int(v) for v in parts[0].split(",")]
    coeffs = [int(v) for v in parts[1].split(",")]
    return RecurrenceBound(init, coeffs)


def parse_bound(text: str) -> BoundSpec:
    text = text.strip()
    if text.startswith("preset:"):
        return _parse_preset(text[7:])
    if text.startswith("table:"):
        return _parse_table(text[6:])
    if text.startswith("rec:"):
        return _parse_rec(text[4:])
    if text.startswith("min:"):
        return MinBound([parse_bound(p) for p in _split_top(text[4:], "|")])
    return ExprBound(E.parse_expr(text))


def eval_bound(f: BoundSpec, n: int):
    """Exact value (``Fraction``) or an :class:`Enclosure` of ``f(n)``."""
    return f.eval(n)

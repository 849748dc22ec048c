"""Config values: numbers, or small arithmetic expressions such as
``"sqrt(3)/5"`` or ``"10*pi"``."""
from __future__ import annotations

import ast
import math
import operator

__all__ = ["ConfigError", "parse_number", "parse_kv_list"]


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


_NAMES = {"pi": math.pi, "e": math.e, "gamma": 1.0,
          "magic": math.degrees(math.acos(1 / math.sqrt(3)))}
_FUNCS = {"sqrt": math.sqrt, "acos": math.acos, "asin": math.asin, "atan": math.atan,
          "cos": math.cos, "sin": math.sin, "tan": math.tan, "log": math.log,
          "exp": math.exp, "degrees": math.degrees, "radians": math.radians}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval(node.operand))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in _FUNCS and not node.keywords:
        return _FUNCS[node.func.id](*[_eval(a) for a in node.args])
    raise ConfigError(f"unsupported expression element: {ast.dump(node)}")


def parse_number(value, name: str = "value") -> float:
    """Float from a JSON number or an arithmetic expression string."""
    if isinstance(value, bool):
        raise ConfigError(f"{name}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            out = _eval(ast.parse(value.strip(), mode="eval"))
        except (SyntaxError, ZeroDivisionError, ValueError, TypeError) as exc:
            raise ConfigError(f"{name}: cannot evaluate {value!r}: {exc}") from None
        if not math.isfinite(out):
            raise ConfigError(f"{name}: {value!r} is not finite")
        return out
    raise ConfigError(f"{name}: expected a number, got {type(value).__name__}")


def parse_kv_list(text: str) -> dict[str, str]:
    """``"a=1,b=sqrt(2)"`` -> ``{"a": "1", "b": "sqrt(2)"}``; commas inside
    parentheses are kept."""
    out: dict[str, str] = {}
    if not text.strip():
        return out
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    parts.append(cur)
    for p in parts:
        if "=" not in p:
            raise ConfigError(f"expected key=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = v.strip()
    return out

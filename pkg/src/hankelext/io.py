"""Line-oriented text formats for tensors, decompositions and parameter files."""

from __future__ import annotations

import re
from typing import Mapping

import numpy as np

from .errors import ParseError
from .tensor import Decomposition, Exponent, SymTensor, glex_key

_HEADER = re.compile(r"^\s*(\w+)((?:\s+\w+=\S+)*)\s*$")


def _header(line: str, kind: str, keys: tuple[str, ...], lineno: int = 1) -> dict[str, int]:
    m = _HEADER.match(line)
    if not m or m.group(1) != kind:
        raise ParseError(f"line {lineno}: expected header '{kind} " + " ".join(f"{k}=<int>" for k in keys) + "'")
    fields = {}
    for kv in m.group(2).split():
        k, _, v = kv.partition("=")
        try:
            fields[k] = int(v)
        except ValueError:
            raise ParseError(f"line {lineno}: {k} must be an integer, got {v!r}") from None
    missing = [k for k in keys if k not in fields]
    if missing:
        raise ParseError(f"line {lineno}: header lacks {', '.join(missing)}")
    return fields


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{_fmt(z.real)}{'+' if z.imag >= 0 or np.isnan(z.imag) else '-'}{_fmt(abs(z.imag))}i"


def parse_complex(tok: str, lineno: int = 0) -> complex:
    """Read 're+imi' (or a bare real) via the builtin parser."""
    t = tok.strip()
    if t.endswith("i"):
        t = t[:-1] + "j"
    try:
        return complex(t)
    except ValueError:
        raise ParseError(f"line {lineno}: cannot read complex number {tok!r}") from None


def _exponent_line(line: str, n: int, lineno: int) -> tuple[Exponent, complex]:
    left, sep, right = line.partition(":")
    if not sep:
        raise ParseError(f"line {lineno}: expected '<exponents> : <re> <im>'")
    try:
        alpha = tuple(int(x) for x in left.split())
        vals = [float(x) for x in right.split()]
    except ValueError:
        raise ParseError(f"line {lineno}: non-numeric token") from None
    if len(alpha) != n:
        raise ParseError(f"line {lineno}: expected {n} exponents, got {len(alpha)}")
    if min(alpha, default=0) < 0:
        raise ParseError(f"line {lineno}: negative exponent")
    if len(vals) not in (1, 2):
        raise ParseError(f"line {lineno}: expected '<re> <im>'")
    return alpha, complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def _content_lines(text: str):
    for k, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s and not s.startswith("#"):
            yield k, s


# ------------------------------------------------------------------ tensors

def dumps_tensor(phi: SymTensor) -> str:
    out = [f"symtensor n={phi.n} d={phi.d}"]
    for a, v in phi.to_dict().items():
        out.append(" ".join(map(str, a)) + f" : {_fmt(v.real)} {_fmt(v.imag)}")
    return "\n".join(out) + "\n"


def loads_tensor(text: str) -> SymTensor:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("line 1: empty tensor file")
    k0, first = lines[0]
    hdr = _header(first, "symtensor", ("n", "d"), k0)
    n, d = hdr["n"], hdr["d"]
    if n < 1 or d < 0:
        raise ParseError(f"line {k0}: need n >= 1 and d >= 0")
    coeffs: dict[Exponent, complex] = {}
    for k, s in lines[1:]:
        a, v = _exponent_line(s, n, k)
        if sum(a) > d:
            raise ParseError(f"line {k}: exponent size {sum(a)} exceeds d={d}")
        coeffs[a] = coeffs.get(a, 0) + v
    return SymTensor.from_dict(n, d, coeffs)


# ---------------------------------------------------------- decompositions

def dumps_decomposition(dec: Decomposition) -> str:
    n = dec.points.shape[1] - 1
    out = [f"decomposition n={n} s={dec.size}"]
    w = dec.weights if dec.weights is not None else np.ones(dec.size)
    for z, lam in zip(dec.points, w):
        lam = complex(lam)
        out.append(" ".join(format_complex(x) for x in z) + f" : {_fmt(lam.real)} {_fmt(lam.imag)}")
    return "\n".join(out) + "\n"


def loads_decomposition(text: str) -> Decomposition:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("line 1: empty decomposition file")
    k0, first = lines[0]
    hdr = _header(first, "decomposition", ("n", "s"), k0)
    n, s = hdr["n"], hdr["s"]
    if len(lines) - 1 != s:
        raise ParseError(f"line {k0}: header promises {s} points, found {len(lines) - 1}")
    pts = np.zeros((s, n + 1), dtype=complex)
    lam = np.zeros(s, dtype=complex)
    for row, (k, line) in enumerate(lines[1:]):
        left, sep, right = line.partition(":")
        toks = left.split()
        if not sep or len(toks) != n + 1:
            raise ParseError(f"line {k}: expected {n + 1} coordinates then ': <re> <im>'")
        pts[row] = [parse_complex(t, k) for t in toks]
        try:
            vals = [float(x) for x in right.split()]
        except ValueError:
            raise ParseError(f"line {k}: non-numeric weight") from None
        if len(vals) != 2:
            raise ParseError(f"line {k}: expected '<re> <im>' weight")
        lam[row] = complex(*vals)
    return Decomposition(pts, lam)


# ------------------------------------------------------------- parameters

def dumps_params(params: Mapping[Exponent, complex]) -> str:
    out = []
    for a in sorted(params, key=glex_key):
        v = complex(params[a])
        out.append(" ".join(map(str, a)) + f" : {_fmt(v.real)} {_fmt(v.imag)}")
    return "\n".join(out) + "\n"


def loads_params(text: str, n: int) -> dict[Exponent, complex]:
    out = {}
    for k, s in _content_lines(text):
        a, v = _exponent_line(s, n, k)
        out[a] = v
    return out

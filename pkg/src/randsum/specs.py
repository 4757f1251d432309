"""Parse model specification strings such as ``poisson:lambda=100``.

Grammar::

    spec     := family ":" params | "conv[" INT "]:" spec | "pmf:@" PATH
    params   := key "=" value ("," key "=" value)*

Index families: dirac, poisson, binomial, hyper, negbin, conv[k], pmf.
Summand families: const, bern, twopoint, exp, uniform, pmf.
A ``pmf:`` spec may also inline its table as ``pmf:0=0.25;1=0.5;2=0.25``.
"""

from __future__ import annotations

import re

from . import models as m
from .errors import SpecSyntaxError

_CONV = re.compile(r"^conv\[(\d+)\]:(.+)$")


def _params(body: str, required: tuple[str, ...]) -> dict[str, str]:
    out = {}
    for part in filter(None, body.split(",")):
        key, sep, value = part.partition("=")
        if not sep:
            raise SpecSyntaxError(f"expected key=value, got {part!r}")
        out[key.strip()] = value.strip()
    missing = [k for k in required if k not in out]
    extra = [k for k in out if k not in required]
    if missing or extra:
        raise SpecSyntaxError(f"parameters {sorted(out)} do not match required {list(required)}")
    return out


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise SpecSyntaxError(f"expected an integer, got {text!r}") from None


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise SpecSyntaxError(f"expected a number, got {text!r}") from None


def _table(body: str) -> m.DiscretePmf:
    if body.startswith("@"):
        return m.DiscretePmf.from_csv(body[1:])
    pairs = {}
    for part in filter(None, body.split(";")):
        key, sep, value = part.partition("=")
        if not sep:
            raise SpecSyntaxError(f"expected value=probability, got {part!r}")
        pairs[_float(key)] = _float(value)
    if not pairs:
        raise SpecSyntaxError("empty pmf table")
    return m.DiscretePmf.from_mapping(pairs)


def _split(text: str) -> tuple[str, str]:
    family, sep, body = text.strip().partition(":")
    if not sep:
        raise SpecSyntaxError(f"missing ':' in model spec {text!r}")
    return family.lower(), body


def parse_index(text: str) -> m.IndexModel:
    conv = _CONV.match(text.strip())
    if conv:
        return m.Convolution(parse_index(conv.group(2)), int(conv.group(1)))
    family, body = _split(text)
    if family == "dirac":
        return m.Dirac(_int(_params(body, ("n",))["n"]))
    if family == "poisson":
        return m.Poisson(_float(_params(body, ("lambda",))["lambda"]))
    if family in ("binomial", "bin"):
        p = _params(body, ("n", "p"))
        return m.Binomial(_int(p["n"]), _float(p["p"]))
    if family in ("hyper", "hypergeometric"):
        p = _params(body, ("n", "r", "s"))
        return m.Hypergeometric(_int(p["n"]), _int(p["r"]), _int(p["s"]))
    if family == "negbin":
        p = _params(body, ("r", "q"))
        return m.NegativeBinomial(_float(p["r"]), _float(p["q"]))
    if family == "pmf":
        return m.FiniteIndex(_table(body))
    raise SpecSyntaxError(f"unknown index family {family!r}")


def parse_summand(text: str) -> m.SummandModel:
    family, body = _split(text)
    if family in ("const", "constant"):
        return m.Constant(_float(_params(body, ("v",))["v"]))
    if family in ("bern", "bernoulli"):
        return m.Bernoulli(_float(_params(body, ("p",))["p"]))
    if family == "twopoint":
        p = _params(body, ("x0", "x1", "p"))
        return m.TwoPoint(_float(p["x0"]), _float(p["x1"]), _float(p["p"]))
    if family in ("exp", "exponential"):
        return m.Exponential(_float(_params(body, ("rate",))["rate"]))
    if family in ("uniform", "unif"):
        p = _params(body, ("lo", "hi"))
        return m.Uniform(_float(p["lo"]), _float(p["hi"]))
    if family == "pmf":
        return m.FiniteSummand(_table(body))
    raise SpecSyntaxError(f"unknown summand family {family!r}")

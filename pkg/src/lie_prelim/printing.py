"""Canonical ASCII printer (grammar round-trip) and LaTeX printer."""

from __future__ import annotations

from fractions import Fraction

from .expr import (Add, Expr, ExpF, Func, Jet, LnF, Mul, Pow, Rat, Sym,
                   monomial_parts, term_coeff, _base_exp, _make_term)


def to_text(e: Expr) -> str:
    if isinstance(e, Add):
        out = [_term_text(e.terms[0], lead=True)]
        for t in e.terms[1:]:
            c = term_coeff(t)
            if c < 0:
                out.append(" - " + _term_text(_negate(t), lead=True))
            else:
                out.append(" + " + _term_text(t, lead=True))
        return "".join(out)
    return _term_text(e, lead=True)


def _negate(t: Expr) -> Expr:
    return _make_term(-term_coeff(t), monomial_parts(t))


def _term_text(t: Expr, lead: bool = False) -> str:
    c = term_coeff(t)
    parts = monomial_parts(t)
    sign = "-" if c < 0 else ""
    c = abs(c)
    num_parts = []
    den_parts = []
    for p in parts:
        b, ex = _base_exp(p)
        if isinstance(ex, Rat) and ex.value < 0:
            den_parts.append(_factor_text(b, Rat(-ex.value)))
        else:
            num_parts.append(_factor_text(b, ex))
    num_pieces = []
    if c.numerator != 1 or not num_parts:
        num_pieces.append(str(c.numerator))
    num_pieces.extend(num_parts)
    s = "*".join(num_pieces)
    den_pieces = []
    if c.denominator != 1:
        den_pieces.append(str(c.denominator))
    den_pieces.extend(den_parts)
    if den_pieces:
        if len(den_pieces) == 1:
            s += "/" + den_pieces[0]
        else:
            s += "/(" + "*".join(den_pieces) + ")"
    return sign + s


def _factor_text(base: Expr, ex: Expr) -> str:
    bs = _base_text(base)
    if ex.is_one:
        return bs
    if isinstance(ex, Rat) and ex.value.denominator == 1 and ex.value >= 0:
        return f"{bs}^{ex.value.numerator}"
    return f"{bs}^({to_text(ex)})"


def _base_text(b: Expr) -> str:
    if isinstance(b, Rat):
        v = b.value
        if v.denominator == 1 and v >= 0:
            return str(v.numerator)
        return f"({v.numerator}/{v.denominator})" if v >= 0 else f"({v})"
    if isinstance(b, (Sym, Jet)):
        return b.name
    if isinstance(b, Func):
        if b.dvars:
            head = f"Diff({b.name},{','.join(b.dvars)})"
        else:
            head = b.name
        if b.is_identity_application:
            return head
        return head + "(" + ",".join(to_text(a) for a in b.args) + ")"
    if isinstance(b, ExpF):
        return f"exp({to_text(b.arg)})"
    if isinstance(b, LnF):
        return f"ln({to_text(b.arg)})"
    if isinstance(b, Add):
        return f"({to_text(b)})"
    if isinstance(b, (Mul, Pow)):
        return f"({to_text(b)})"
    raise TypeError(type(b))


# ---------------------------------------------------------------------------
# LaTeX
# ---------------------------------------------------------------------------

_GREEK = {"tau": r"\tau", "xi": r"\xi", "eta": r"\eta", "eta1": r"\eta^1",
          "delta": r"\delta", "deltat": r"\tilde\delta", "deltah": r"\hat\delta",
          "eps": r"\varepsilon", "epsilon": r"\varepsilon", "theta": r"\theta",
          "phi": r"\varphi", "omega": r"\omega", "ftilde": r"\tilde f",
          "gtilde": r"\tilde g", "alpha": r"\alpha", "beta": r"\beta"}


def _name_latex(name: str) -> str:
    if name in _GREEK:
        return _GREEK[name]
    if len(name) > 1 and name[-1].isdigit() and not name[:-1][-1].isdigit():
        return f"{_name_latex(name[:-1])}_{{{name[-1]}}}"
    return name


def to_latex(e: Expr) -> str:
    if isinstance(e, Add):
        out = [_term_latex(e.terms[0])]
        for t in e.terms[1:]:
            if term_coeff(t) < 0:
                out.append(" - " + _term_latex(_negate(t)))
            else:
                out.append(" + " + _term_latex(t))
        return "".join(out)
    return _term_latex(e)


def _term_latex(t: Expr) -> str:
    c = term_coeff(t)
    parts = monomial_parts(t)
    sign = "-" if c < 0 else ""
    c = abs(c)
    num, den = [], []
    for p in parts:
        b, ex = _base_exp(p)
        if isinstance(ex, Rat) and ex.value < 0:
            den.append(_factor_latex(b, Rat(-ex.value)))
        else:
            num.append(_factor_latex(b, ex))
    ns = " ".join(num) if num else ""
    if c != 1 or not ns:
        cs = str(c.numerator) if c.denominator == 1 else None
        if cs is not None:
            ns = (cs + " " + ns).strip()
        else:
            den.insert(0, str(c.denominator))
            ns = (str(c.numerator) + " " + ns).strip()
    if den:
        return sign + r"\frac{%s}{%s}" % (ns, " ".join(den))
    return sign + ns


def _factor_latex(b: Expr, ex: Expr) -> str:
    bs = _base_latex(b)
    if ex.is_one:
        return bs
    return f"{bs}^{{{to_latex(ex)}}}"


def _base_latex(b: Expr) -> str:
    if isinstance(b, Rat):
        v = b.value
        return str(v.numerator) if v.denominator == 1 and v >= 0 else f"({v})"
    if isinstance(b, Sym):
        return _name_latex(b.name)
    if isinstance(b, Jet):
        idx = b.name[2:]
        return f"u_{{{idx}}}" if len(idx) > 1 else f"u_{idx}"
    if isinstance(b, Func):
        head = _name_latex(b.name)
        if b.dvars:
            head = f"{head}_{{{''.join(b.dvars)}}}"
        if b.is_identity_application:
            return head
        return head + r"\left(" + ",".join(to_latex(a) for a in b.args) + r"\right)"
    if isinstance(b, ExpF):
        return f"e^{{{to_latex(b.arg)}}}"
    if isinstance(b, LnF):
        return r"\ln\left(" + to_latex(b.arg) + r"\right)"
    return r"\left(" + to_latex(b) + r"\right)"

"""Batch runner: named checks, JSON configuration, JSON reports.

Cases are generated in the parent process from a seed derived from the
config seed and the check name, then dispatched (optionally to a process
pool) and reassembled in case order, so reports are reproducible and
independent of ``--jobs``.
"""
from __future__ import annotations

import argparse
import cmath
import itertools
import json
import math
import sys
import time
import traceback
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .exact import primes_upto

REPORT_SCHEMA = "qkroots-report/1"
MODES = ("exact-random-rational", "numeric-random", "explicit")
STATUSES = ("pass", "fail", "finding")

CONVENTIONS = {
    "q_restoration": {"tpp1": True, "tpp0": False},
    "bethe_hbar": "hbar of the Bethe system = (hbar of the difference operator)^2",
    "bethe_twist": "z * hbar^(-n/2), principal square root",
    "frobenius_gauge": "frobenius",
    "powered_q": "q^(p^2)",
    "conjugation_product": "iterate: M(z q^(p-1)) ... M(z)",
    "iterated_product": "literal: M(z) M(z q) ... M(z q^(p-1))",
    "cohomological_h": "2h (a = 1 + eps u, hbar = 1 + eps h)",
    "pencil_matrix": "A(z) = (T*P^1 log matrix)/z, connection d + s A",
    "pencil_factor": "s^p - s",
    "uniformizer": "lambda = zeta_p - 1",
    "dilog_branch": "principal, cut [1, inf)",
}


class ConfigError(ValueError):
    pass


# JSON helpers ---------------------------------------------------------------------
def _frac(v) -> Fraction:
    try:
        return Fraction(str(v))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a rational number: {v!r}") from exc


def _fjson(x) -> str:
    return str(Fraction(x))


def _cplx(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            pass
    raise ConfigError(f"not a complex number: {v!r}")


def _cjson(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _float(x):
    x = float(x)
    return None if math.isnan(x) else (x if math.isfinite(x) else ("inf" if x > 0 else "-inf"))


# random draws -----------------------------------------------------------------------
def _rand_rational(rng, forbid=()) -> Fraction:
    while True:
        v = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
        if v not in forbid and v != 0:
            return v


def _rand_tpp1_rational(rng) -> dict:
    a1 = _rand_rational(rng)
    a2 = _rand_rational(rng, forbid=(a1,))
    h = _rand_rational(rng, forbid=(1, -1))
    return {"a1": _fjson(a1), "a2": _fjson(a2), "hbar": _fjson(h)}


def _rand_unit(rng, lo=0.5, hi=2.0) -> complex:
    return float(rng.uniform(lo, hi)) * cmath.exp(2j * math.pi * float(rng.random()))


def _rand_tpp1_numeric(rng) -> dict:
    while True:
        a1, a2 = _rand_unit(rng), _rand_unit(rng)
        h = _rand_unit(rng, 0.7, 1.4)
        if abs(a1 - a2) > 0.2 and abs(h - 1) > 0.1 and abs(h + 1) > 0.1:
            return {"a1": _cjson(a1), "a2": _cjson(a2), "hbar": _cjson(h),
                    "z": _cjson(_rand_unit(rng, 0.1, 0.5))}


def _rand_grassmannian(rng, k, n, zmax=0.3) -> dict:
    while True:
        a = [_rand_unit(rng) for _ in range(n)]
        h = _rand_unit(rng, 0.7, 1.4)
        ok = abs(h - 1) > 0.1 and all(abs(h ** r - 1) > 0.05 for r in range(1, 5))
        for i, j in itertools.permutations(range(n), 2):
            ok = ok and abs(a[i] - a[j]) > 0.2 and abs(a[i] - h * a[j]) > 0.1
        if ok:
            return {"k": k, "n": n, "a": [_cjson(v) for v in a], "hbar": _cjson(h),
                    "z": _cjson(_rand_unit(rng, 0.05, zmax))}


# check definitions --------------------------------------------------------------------
@dataclass(frozen=True)
class CheckSpec:
    name: str
    module: str
    tags: tuple
    budget_s: float
    summary: str
    default_mode: str
    defaults: dict
    options: tuple
    make_cases: Callable
    run_case: Callable


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# qde
def _cases_qde_char(cfg, rng):
    out = []
    for p in cfg["primes"]:
        for _ in range(cfg["draws"]):
            out.append({**_rand_tpp1_rational(rng), "p": p})
    return out


def _run_qde_char(pr, tol):
    from .exact.cyclo import CycloNum
    from .qde import build_model, characteristic_residual, iterated_product, mbold_ratfun

    a1, a2, h, p = _frac(pr["a1"]), _frac(pr["a2"]), _frac(pr["hbar"]), int(pr["p"])
    model = build_model("tpp1", a1, a2, h)
    X = mbold_ratfun(model) if p == 1 else iterated_product(model, p, CycloNum.zeta(p))
    R = characteristic_residual(X, a1, a2, h, p)
    nz = [[int(i), int(j)] for (i, j), e in np.ndenumerate(R) if e != 0]
    return {"status": _status(not nz), "data": {"residual_zero": not nz, "nonzero_entries": nz}}


def _cases_qde_spectrum(cfg, rng):
    return [{**_rand_tpp1_numeric(rng), "p": p} for p in cfg["primes"] for _ in range(cfg["draws"])]


def _run_qde_spectrum(pr, tol):
    from .qde import build_model, eigenvalues, iterated_product, match_multisets

    a1, a2, h, z, p = _cplx(pr["a1"]), _cplx(pr["a2"]), _cplx(pr["hbar"]), _cplx(pr["z"]), int(pr["p"])
    model = build_model("tpp1", a1, a2, h)
    spec = {}
    for k in (1, 2) if p > 2 else (1,):
        X = iterated_product(model, p, cmath.exp(2j * math.pi * k / p), z=z)
        spec[k] = eigenvalues(X)
    target = eigenvalues(np.array(model.powered(p).M(z ** p, 1.0), dtype=complex))
    err = match_multisets(spec[1], target)[0]
    gap = match_multisets(spec[1], spec[2])[0] if 2 in spec else 0.0
    ok = err <= tol.get("rel", 1e-8) and gap <= tol.get("root", 1e-10)
    return {"status": _status(ok), "data": {"max_rel_error": err, "primitive_root_gap": gap}}


def _cases_coh(cfg, rng):
    return [{"model": "tpp1"}]


def _run_coh(pr, tol):
    from .qde import cohomological_limit, linear_forms_equal, printed_connection

    C = cohomological_limit(pr.get("model", "tpp1"))
    matches = [name for name, s in (("h", 1), ("2h", 2)) if linear_forms_equal(C, printed_connection(s))]
    return {"status": _status(len(matches) == 1),
            "data": {"matching_conventions": matches, "convention": matches[0] if len(matches) == 1 else None}}


# frobenius
def _model_params(model, pr):
    from .qde import build_model

    if model == "tpp0":
        return build_model("tpp0", hbar=_frac(pr["hbar"]))
    return build_model("tpp1", _frac(pr["a1"]), _frac(pr["a2"]), _frac(pr["hbar"]))


def _cases_frob(cfg, rng):
    out = []
    opts = cfg["options"]
    for model in opts.get("models", ["tpp0", "tpp1"]):
        for p in cfg["primes"]:
            for _ in range(cfg["draws"]):
                pr = _rand_tpp1_rational(rng)
                pr.update(model=model, p=p, D=cfg["orders"].get("D", 2 * p),
                          gauge=opts.get("gauge", "frobenius"), q_power=opts.get("q_power", "p^2"))
                if model == "tpp0":
                    pr.pop("a1"), pr.pop("a2")
                out.append(pr)
    return out


def _qpow(pr, p):
    v = pr.get("q_power", "p^2")
    return p * p if v == "p^2" else p if v == "p" else int(v)


def _run_frob_pole(pr, tol):
    from .frobenius import compute_intertwiner, numeric_limit_gap, pole_certificate

    p = int(pr["p"])
    model = _model_params(pr["model"], pr)
    F = compute_intertwiner(model, p, int(pr["D"]), gauge=pr.get("gauge", "frobenius"), q_power=_qpow(pr, p))
    cert = pole_certificate(F)
    data = {"passed": cert["passed"], "control_confirmed": cert["control_confirmed"],
            "offending": cert["offending"][:10], "control_first_hit": cert["control_first_hit"]}
    if cert["passed"]:
        data["numeric_limit_gap"] = numeric_limit_gap(F)
    ok = cert["passed"] and cert["control_confirmed"]
    nondefault = pr.get("gauge", "frobenius") != "frobenius" or _qpow(pr, p) != p * p
    status = "pass" if ok else ("finding" if nondefault else "fail")
    return {"status": status, "data": data}


def _cases_conj(cfg, rng):
    out = []
    opts = cfg["options"]
    for model in opts.get("models", ["tpp1"]):
        for p in cfg["primes"]:
            for _ in range(cfg["draws"]):
                pr = _rand_tpp1_rational(rng)
                pr.update(model=model, p=p, D=cfg["orders"].get("D", 2 * p), product=opts.get("product", "iterate"))
                if model == "tpp0":
                    pr.pop("a1"), pr.pop("a2")
                out.append(pr)
    return out


def _run_conj(pr, tol):
    from .frobenius import conjugation_check, first_nonzero_order

    p = int(pr["p"])
    R = conjugation_check(_model_params(pr["model"], pr), p, int(pr["D"]), product=pr.get("product", "iterate"))
    first = first_nonzero_order(R)
    if first is None:
        status = "pass"
    else:
        status = "finding" if pr.get("product") == "literal" else "fail"
    return {"status": status, "data": {"residual_zero": first is None, "first_nonzero_order": first}}


def _cases_tpp0(cfg, rng):
    form = cfg["options"].get("form", "printed")
    return [{"hbar": _fjson(_rand_rational(rng, forbid=(1, -1))), "p": p, "D": cfg["orders"].get("D", 12), "form": form}
            for p in cfg["primes"] for _ in range(cfg["draws"])]


def _run_tpp0(pr, tol):
    from .frobenius import series_difference_orders, tpp0_closed_form, tpp0_intertwiner

    h, p, D = _frac(pr["hbar"]), int(pr["p"]), int(pr["D"])
    F = tpp0_intertwiner(h, p, D)
    G = tpp0_closed_form(h, p, D, corrected=pr.get("form") == "corrected")
    diff = series_difference_orders(F, G)
    return {"status": _status(not diff), "data": {"mismatch_orders": diff}}


# bethe / vertex
def _cases_bethe(cfg, rng):
    shapes = cfg["options"].get("shapes", [[1, 2], [2, 4]])
    return [_rand_grassmannian(rng, int(k), int(n)) for k, n in shapes for _ in range(cfg["draws"])]


def _gdata(pr):
    from .bethe import GrassmannianData

    return GrassmannianData(int(pr["k"]), int(pr["n"]), tuple(_cplx(v) for v in pr["a"]), _cplx(pr["hbar"]), _cplx(pr["z"]))


def _run_bethe_solve(pr, tol):
    from .bethe import solve_bethe

    data = _gdata(pr)
    sols = solve_bethe(data, tol=tol.get("residual", 1e-10))
    out = {"count": len(sols), "expected": math.comb(data.n, data.k),
           "max_residual": max(s.residual_norm for s in sols),
           "roots": [[_cjson(r) for r in s.roots] for s in sols]}
    if data.k == 1 and data.n == 2:
        from .qde import build_model, eigenvalues, match_multisets

        hm = cmath.sqrt(complex(data.hbar))
        model = build_model("tpp1", complex(data.a[0]), complex(data.a[1]), hm)
        ev = eigenvalues(np.array(model.M(complex(data.z), 1.0), dtype=complex))
        out["qde_eigenvalue_gap"] = match_multisets(ev, [s.eigenvalue for s in sols])[0]
        if out["qde_eigenvalue_gap"] > tol.get("eigen", 1e-10):
            return {"status": "fail", "data": out}
    return {"status": "pass", "data": out}


def _cases_bethe_frob(cfg, rng):
    out = []
    for p in cfg["primes"]:
        for _ in range(cfg["draws"]):
            pr = _rand_tpp1_numeric(rng)
            pr["p"] = p
            out.append(pr)
    return out


def _run_bethe_frob(pr, tol):
    from .bethe import GrassmannianData, powered_root_closure, powered_system_roots, spectrum_frobenius_check
    from .qde import match_multisets

    a1, a2, hm, z, p = _cplx(pr["a1"]), _cplx(pr["a2"]), _cplx(pr["hbar"]), _cplx(pr["z"]), int(pr["p"])
    spec = spectrum_frobenius_check(a1, a2, hm, z, p, tol=tol.get("rel", 1e-8), root_tol=tol.get("root", 1e-10))
    data = GrassmannianData(1, 2, (a1, a2), hm * hm, z)
    closure = match_multisets(powered_system_roots(data, p), powered_root_closure(data, p))[0]
    ok = spec["passed"] and closure <= tol.get("closure", 1e-8)
    return {"status": _status(ok), "data": {"spectrum_rel_error": spec["max_rel_error"],
                                            "primitive_root_gap": spec["primitive_root_gap"],
                                            "root_closure_gap": closure}}


def _run_yy(pr, tol):
    from .bethe import solve_bethe
    from .vertex import gradient_check

    data = _gdata(pr)
    yy = data.yang_yang_data()
    errs = [gradient_check(s.roots, yy) for s in solve_bethe(data)]
    return {"status": _status(max(errs) <= tol.get("gradient", 1e-4)), "data": {"gradient_errors": errs}}


def _cases_vertex(cfg, rng):
    out = []
    eps = cfg["options"].get("eps", [1e-2, 3e-3, 1e-3])
    for p in cfg["primes"]:
        for _ in range(cfg["draws"]):
            # the target is about z^p (1 - hbar^p); keep it away from zero so the
            # O(eps) corrections stay small relative to it
            while True:
                z = _rand_unit(rng, 0.2, 0.3)
                h = _rand_unit(rng, 0.5, 1.4)
                roots = [cmath.exp(2j * math.pi * k / p) for k in range(p)]
                if abs(h * z) <= 0.3 and min(abs(h - r) for r in roots) >= 0.6 * math.sin(math.pi / p):
                    break
            out.append({"hbar": _cjson(h), "z": _cjson(z), "p": p, "eps": eps})
    return out


def _run_vertex(pr, tol):
    from .vertex import scalar_vertex_asymptotics

    h, z, p = _cplx(pr["hbar"]), _cplx(pr["z"]), int(pr["p"])
    eps = [float(e) for e in pr["eps"]]
    errs = {}
    for e in eps:
        r = scalar_vertex_asymptotics(h, z, p, e)
        for name, c in r["cases"].items():
            errs.setdefault(name, []).append(c["rel_error"])
    bound = tol.get("rel", 2e-2)
    final_ok = all(v[-1] <= bound for v in errs.values())
    monotone = all(all(b < a for a, b in zip(v, v[1:])) for v in errs.values())
    return {"status": _status(final_ok and monotone),
            "data": {"rel_errors": errs, "final_within_bound": final_ok, "monotone": monotone}}


# pcurvature
def _cases_pcurv(cfg, rng):
    opts = cfg["options"]
    if "matrix_file" in opts:
        return [{"matrix_file": opts["matrix_file"], "p": p} for p in cfg["primes"]]
    return [{"n": n, "p": p, "seed": int(rng.integers(0, 2 ** 31))}
            for n in opts.get("sizes", [2, 3]) for p in cfg["primes"] for _ in range(cfg["draws"])]


def _connection(pr):
    from .pcurvature import ConnectionData, load_matrix_file, random_connection

    p = int(pr["p"])
    if "matrix_file" in pr:
        return ConnectionData(load_matrix_file(pr["matrix_file"], p), p)
    return random_connection(int(pr["n"]), p, np.random.default_rng(int(pr["seed"])))


def _run_pcurv_structure(pr, tol):
    from .pcurvature import p_curvature

    conn = _connection(pr)
    C = p_curvature(conn)
    return {"status": "pass", "data": {"n": conn.n, "max_s_degree": max(e.degree() for e in C.flat)}}


def _run_pcurv_log(pr, tol):
    from .pcurvature import log_identity_check

    r = log_identity_check(_connection(pr))
    return {"status": _status(r["passed"]), "data": {"offending": r["offending"]}}


def _cases_stirling(cfg, rng):
    return [{"p": p} for p in cfg["primes"]]


def _run_stirling(pr, tol):
    from .pcurvature import stirling_check

    r = stirling_check(int(pr["p"]))
    return {"status": _status(r["passed"]), "data": {"reduced": r["reduced"], "offending": r["offending"]}}


def _cases_pi(cfg, rng):
    out = []
    for p in cfg["primes"]:
        for n in cfg["options"].get("sizes", [2, 3]):
            for _ in range(cfg["draws"]):
                out.append({"p": p, "alpha": rng.integers(-5, 6, (n, n)).tolist(),
                            "beta": rng.integers(-5, 6, (n, n)).tolist()})
    return out


def _run_pi(pr, tol):
    from .pcurvature import pi_lemma_check

    r = pi_lemma_check(int(pr["p"]), pr["alpha"], pr["beta"])
    return {"status": _status(r["passed"]), "data": {"valuation": _float(r["valuation"]), "bound": r["bound"]}}


def _cases_pencil(cfg, rng):
    out = []
    for p in cfg["primes"]:
        if p <= cfg["options"].get("exhaustive_upto", 3):
            for u1, u2, h in itertools.product(range(p), range(p), range(1, p)):
                if u1 != u2:
                    out.append({"p": p, "u1": u1, "u2": u2, "h": h})
        else:
            for _ in range(cfg["draws"]):
                u1 = int(rng.integers(0, p))
                u2 = int((u1 + rng.integers(1, p)) % p)
                out.append({"p": p, "u1": u1, "u2": u2, "h": int(rng.integers(1, p))})
    return out


def _run_pencil(pr, tol):
    from .pcurvature import pencil_spectrum_check

    r = pencil_spectrum_check(int(pr["p"]), int(pr["u1"]), int(pr["u2"]), int(pr["h"]))
    data = {"stage": r["stage"]}
    if not r["passed"]:
        data.update(left=r.get("left"), right=r.get("right"))
    return {"status": _status(r["passed"]), "data": data}


def _cases_root(cfg, rng):
    out = []
    for p in cfg["primes"]:
        for _ in range(cfg["draws"]):
            u1 = int(rng.integers(0, p))
            u2 = int((u1 + rng.integers(1, p)) % p) if p > 1 else 0
            out.append({"p": p, "u1": u1, "u2": u2, "h": int(rng.integers(0, p)),
                        "D_z": cfg["orders"].get("D_z", 2), "h_scale": cfg["options"].get("h_scale", 2)})
    return out


def _run_root(pr, tol):
    from .pcurvature import root_reduction_check

    r = root_reduction_check(int(pr["p"]), int(pr["u1"]), int(pr["u2"]), int(pr["h"]),
                             int(pr.get("D_z", 2)), int(pr.get("h_scale", 2)))
    data = {k: r[k] for k in ("lambda_valuations", "digits", "expected", "digits_agree", "all_digits_zero",
                              "powered_valuations", "powered_digit_vanishes")}
    if "fallback_charpoly" in r:
        data["fallback_charpoly"] = r["fallback_charpoly"]
    return {"status": r["status"], "data": data}


_OPT_MODELS = ("models", "gauge", "q_power")
CATALOG = {c.name: c for c in [
    CheckSpec("qde-char", "qde", ("quadratic-relation", "powered-quadratic-relation"), 30,
              "T*P^1 matrix (p = 1) or iterated product at zeta_p satisfies the characteristic relation exactly",
              "exact-random-rational", {"primes": [1, 2, 3], "draws": 5}, (), _cases_qde_char, _run_qde_char),
    CheckSpec("qde-spectrum", "qde", ("spectrum-at-roots-of-unity",), 10,
              "eigenvalues of the iterated product at zeta_p equal powered-parameter eigenvalues",
              "numeric-random", {"primes": [2, 3, 5, 7], "draws": 10}, (), _cases_qde_spectrum, _run_qde_spectrum),
    CheckSpec("frobenius-pole", "frobenius", ("pole-cancellation-theorem",), 300,
              "Frobenius intertwiner has no Phi_p in any denominator; uncompensated solution does",
              "exact-random-rational", {"primes": [2, 3], "draws": 1}, _OPT_MODELS, _cases_frob, _run_frob_pole),
    CheckSpec("frobenius-conj", "frobenius", ("conjugation-identity",), 300,
              "F Mq(z^p; a^p, hbar^p) = P F at zeta_p to order D",
              "exact-random-rational", {"primes": [2], "draws": 1}, ("models", "product"), _cases_conj, _run_conj),
    CheckSpec("tpp0-closed", "frobenius", ("scalar-intertwiner-closed-form",), 60,
              "scalar T*P^0 intertwiner against the exponential product formula",
              "exact-random-rational", {"primes": [2, 3, 5], "draws": 1}, ("form",), _cases_tpp0, _run_tpp0),
    CheckSpec("bethe-solve", "bethe", ("bethe-equations",), 30,
              "all C(n, k) Bethe solutions with small residuals; k = 1, n = 2 against qde eigenvalues",
              "numeric-random", {"draws": 5}, ("shapes",), _cases_bethe, _run_bethe_solve),
    CheckSpec("bethe-frobenius", "bethe", ("powered-bethe-equations", "bethe-frobenius-spectrum"), 10,
              "powered Bethe roots are the p-th roots of base roots; spectrum matches the iterated product",
              "numeric-random", {"primes": [2, 3, 5, 7], "draws": 5}, (), _cases_bethe_frob, _run_bethe_frob),
    CheckSpec("yangyang-grad", "vertex", ("yang-yang-critical-points",), 30,
              "exp(x_m dY/dx_m) = 1 at every Bethe root (finite differences)",
              "numeric-random", {"draws": 3}, ("shapes",), _cases_bethe, _run_yy),
    CheckSpec("vertex-asymptotics", "vertex", ("vertex-asymptotics", "root-of-unity-asymptotics"), 5,
              "scaled scalar vertex logarithm against dilogarithm limits, with monotone error",
              "numeric-random", {"primes": [2], "draws": 2}, ("eps",), _cases_vertex, _run_vertex),
    CheckSpec("pcurv-structure", "pcurvature", ("p-curvature-definition",), 120,
              "(d + sA)^p has no d^1..d^(p-1) terms and identity at d^p",
              "exact-random-rational", {"primes": [2, 3, 5, 7], "draws": 5}, ("sizes", "matrix_file"),
              _cases_pcurv, _run_pcurv_structure),
    CheckSpec("pcurv-log", "pcurvature", ("log-connection-identity",), 120,
              "(z d + s z A)^p - (z d + s z A) = z^p (d + sA)^p",
              "exact-random-rational", {"primes": [2, 3, 5, 7], "draws": 5}, ("sizes", "matrix_file"),
              _cases_pcurv, _run_pcurv_log),
    CheckSpec("stirling", "pcurvature", ("stirling-recursion",), 1,
              "Stirling row p is (1, 0, ..., 0, 1) mod p",
              "explicit", {"primes": primes_upto(23), "draws": 1}, (), _cases_stirling, _run_stirling),
    CheckSpec("pi-lemma", "pcurvature", ("pi-adic-binomial-lemma",), 30,
              "(1 + pi a + pi^2 b)^p = 1 + pi^p (a^p - a) + O(pi^(p+1))",
              "exact-random-rational", {"primes": [3, 5], "draws": 5}, ("sizes",), _cases_pi, _run_pi),
    CheckSpec("pencil-spectrum", "pcurvature", ("pencil-spectrum-theorem",), 300,
              "charpoly z^p C_p(d + sA) = charpoly (s^p - s) z^p A(z^p) for the T*P^1 pencil",
              "exact-random-rational", {"primes": [2, 3, 5], "draws": 20}, ("exhaustive_upto",),
              _cases_pencil, _run_pencil),
    CheckSpec("root-reduction", "pcurvature", ("root-of-unity-reduction", "exploratory"), 300,
              "lambda-digits of the iterated product at zeta_p against the p-curvature",
              "exact-random-rational", {"primes": [2, 3], "draws": 3}, ("h_scale",), _cases_root, _run_root),
    CheckSpec("coh-limit", "qde", ("cohomological-limit",), 1,
              "first-order limit of the T*P^1 matrix against the pencil log matrix; records the h convention",
              "explicit", {"draws": 1}, (), _cases_coh, _run_coh),
]}


def list_checks() -> list:
    return [{"name": c.name, "module": c.module, "tags": list(c.tags), "default_budget_s": c.budget_s,
             "summary": c.summary, "default_mode": c.default_mode, "options": list(c.options)}
            for c in CATALOG.values()]


# configuration ----------------------------------------------------------------------
_CHECK_KEYS = {"check", "mode", "primes", "draws", "orders", "params", "tolerances", "options", "seed"}


def normalize_check_config(raw: dict, seed: int) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("each check config must be a JSON object")
    unknown = set(raw) - _CHECK_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    name = raw.get("check")
    if name not in CATALOG:
        raise ConfigError(f"unknown check {name!r}; see `qkroots list`")
    spec = CATALOG[name]
    mode = raw.get("mode", spec.default_mode)
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    cfg = {"check": name, "mode": mode, "seed": int(raw.get("seed", seed))}
    cfg["primes"] = raw.get("primes", spec.defaults.get("primes", []))
    cfg["draws"] = raw.get("draws", spec.defaults.get("draws", 1))
    if not isinstance(cfg["primes"], list) or not all(isinstance(p, int) and p >= 1 for p in cfg["primes"]):
        raise ConfigError("primes must be a list of positive integers")
    if not isinstance(cfg["draws"], int) or cfg["draws"] < 1:
        raise ConfigError("draws must be a positive integer")
    for key in ("orders", "tolerances", "options"):
        v = raw.get(key, {})
        if not isinstance(v, dict):
            raise ConfigError(f"{key} must be an object")
        cfg[key] = v
    bad = set(cfg["options"]) - set(spec.options)
    if bad:
        raise ConfigError(f"options {sorted(bad)} not accepted by {name}")
    if mode == "explicit" and "params" in raw:
        params = raw["params"]
        cfg["params"] = params if isinstance(params, list) else [params]
        if not all(isinstance(p, dict) for p in cfg["params"]):
            raise ConfigError("params must be an object or a list of objects")
    return cfg


def load_config(path: str, seed: int | None = None) -> list:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    return parse_config(raw, seed)


def parse_config(raw, seed: int | None = None) -> list:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    base_seed = seed if seed is not None else int(raw.get("seed", 0))
    if "checks" in raw:
        extra = set(raw) - {"checks", "seed"}
        if extra:
            raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
        items = raw["checks"]
        if not isinstance(items, list) or not items:
            raise ConfigError("checks must be a nonempty list")
    else:
        items = [raw]
    cfgs = []
    for item in items:
        if seed is not None and isinstance(item, dict):
            item = {**item, "seed": seed}
        cfgs.append(normalize_check_config(item, base_seed))
    return cfgs


def _check_rng(cfg) -> np.random.Generator:
    return np.random.default_rng([cfg["seed"], zlib.crc32(cfg["check"].encode())])


def make_cases(cfg) -> list:
    spec = CATALOG[cfg["check"]]
    if cfg["mode"] == "explicit" and "params" in cfg:
        return [dict(p) for p in cfg["params"]]
    try:
        return spec.make_cases(cfg, _check_rng(cfg))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot build cases for {cfg['check']}: {exc}") from exc


# execution --------------------------------------------------------------------------------
def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return _cjson(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return repr(x)


def run_case(task) -> dict:
    name, index, params, tol = task
    t0 = time.perf_counter()
    try:
        out = CATALOG[name].run_case(params, tol)
        rec = {"index": index, "params": params, "status": out["status"], "data": _jsonable(out["data"])}
    except Exception as exc:  # surfaced per case with reproduction parameters
        rec = {"index": index, "params": params, "status": "fail",
               "error": f"{type(exc).__name__}: {exc}",
               "traceback": traceback.format_exc(limit=3)}
    rec["runtime_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    return rec


def run_check(cfg, jobs: int = 1, pool=None) -> dict:
    spec = CATALOG[cfg["check"]]
    t0 = time.perf_counter()
    cases = make_cases(cfg)
    tasks = [(spec.name, i, _jsonable(p), cfg["tolerances"]) for i, p in enumerate(cases)]
    if pool is not None and len(tasks) > 1:
        records = list(pool.map(run_case, tasks))
    else:
        records = [run_case(t) for t in tasks]
    records.sort(key=lambda r: r["index"])
    counts = {s: sum(r["status"] == s for r in records) for s in STATUSES}
    runtime = round((time.perf_counter() - t0) * 1000, 3)
    return {
        "check": spec.name,
        "module": spec.module,
        "tags": list(spec.tags),
        "mode": cfg["mode"],
        "seed": cfg["seed"],
        "options": cfg["options"],
        "orders": cfg["orders"],
        "tolerances": cfg["tolerances"],
        "status": "fail" if counts["fail"] else ("finding" if counts["finding"] else "pass"),
        "counts": counts,
        "n_cases": len(records),
        "budget_s": spec.budget_s,
        "within_budget": runtime <= 1000 * spec.budget_s,
        "runtime_ms": runtime,
        "cases": records,
    }


def run_config(cfgs: list, jobs: int = 1) -> dict:
    t0 = time.perf_counter()
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        checks = [run_check(c, jobs, pool) for c in cfgs]
    finally:
        if pool is not None:
            pool.shutdown()
    failed = any(c["status"] == "fail" for c in checks)
    return {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "backend": BACKEND,
        "conventions": CONVENTIONS,
        "status": "fail" if failed else "pass",
        "checks": checks,
        "runtime_ms": round((time.perf_counter() - t0) * 1000, 3),
    }


def strip_timing(report):
    """Report content without runtime fields, for determinism comparisons."""
    if isinstance(report, dict):
        return {k: strip_timing(v) for k, v in report.items()
                if k not in ("runtime_ms", "within_budget", "traceback", "backend")}
    if isinstance(report, list):
        return [strip_timing(v) for v in report]
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qkroots", description="Verification checks for quantum difference equations at roots of unity.")
    sub = parser.add_subparsers(dest="cmd", required=True)
    run = sub.add_parser("run", help="run checks from a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--jobs", type=int, default=1)
    sub.add_parser("list", help="print the check catalog as JSON")
    args = parser.parse_args(argv)

    if args.cmd == "list":
        json.dump(list_checks(), sys.stdout, indent=2)
        sys.stdout.write("\n")
        return 0
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 2
    try:
        cfgs = load_config(args.config, args.seed)
        for c in cfgs:
            make_cases(c)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = run_config(cfgs, args.jobs)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for c in report["checks"]:
        n = c["counts"]
        print(f"{c['check']:<20} {c['status']:<8} pass={n['pass']} fail={n['fail']} finding={n['finding']} "
              f"({c['runtime_ms'] / 1000:.2f} s)")
    return 1 if report["status"] == "fail" else 0


if __name__ == "__main__":
    sys.exit(main())

"""JSON model files.

Layout (``format_version`` 1)::

    {
      "format": "slpca-model", "format_version": 1,
      "column_names": [...],
      "centering": {"means": [...], "scales": [...], "standardized": false},
      "basis": {"d": d, "p": p, "source": "pca|contiguity|user",
                "axes": [[...] x d], "complement": [[...] x (p-d)]},
      "regression": {"kind": "linear", "intercept": [...], "coefficients": [[...] x d]}
                  | {"kind": "spline", "intercept": [...], "extrapolation": "clamp",
                     "bases": [{"degree": k, "num_basis": m, "knots": [...],
                                "domain": [lo, hi]}, ...],
                     "blocks": [[[...] x m], ...]},
      "mu_x": [...], "sigma_x": [[...]], "sigma2": s2, "n_train": n,
      "log_likelihood": ll|null, "gamma": g|null, "bic": b|null,
      "degenerate": false, "seed": null
    }

Matrices are stored row-major as nested lists.  Floats are written with
Python's shortest round-trip representation, so a save/load cycle is exact.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .axes import CompletedBasis
from .data import CenteringInfo
from .errors import InputError
from .model import SlpcaModel
from .regress import AdditiveRegression, LinearRegression
from .spline import BSplineBasis

FORMAT = "slpca-model"
FORMAT_VERSION = 1


def _list(a):
    return np.asarray(a, dtype=float).tolist()


def to_dict(model: SlpcaModel) -> dict:
    reg = model.regression
    if isinstance(reg, LinearRegression):
        regression = {"kind": "linear", "intercept": _list(reg.intercept),
                      "coefficients": _list(reg.coefficients)}
    else:
        regression = {
            "kind": "spline",
            "intercept": _list(reg.intercept),
            "extrapolation": "clamp",
            "bases": [{"degree": b.degree, "num_basis": b.num_basis, "knots": _list(b.knots),
                       "domain": [b.lo, b.hi]} for b in reg.bases],
            "blocks": [_list(block) for block in reg.blocks],
        }
    return {
        "format": FORMAT,
        "format_version": FORMAT_VERSION,
        "column_names": list(model.column_names),
        "centering": {"means": _list(model.centering.means),
                      "scales": _list(model.centering.scales),
                      "standardized": model.centering.standardized},
        "basis": {"d": model.d, "p": model.p, "source": model.axes_source,
                  "axes": _list(model.basis.P), "complement": _list(model.basis.Pbar)},
        "regression": regression,
        "mu_x": _list(model.mu_x),
        "sigma_x": _list(model.sigma_x),
        "sigma2": float(model.sigma2),
        "n_train": int(model.n_train),
        "log_likelihood": model.log_likelihood,
        "gamma": model.gamma,
        "bic": model.bic,
        "degenerate": bool(model.degenerate),
        "seed": model.seed,
    }


def from_dict(doc: dict) -> SlpcaModel:
    if doc.get("format") != FORMAT:
        raise InputError("not an slpca model file")
    if doc.get("format_version") != FORMAT_VERSION:
        raise InputError(f"unsupported model format version {doc.get('format_version')}")
    try:
        b = doc["basis"]
        d, p = int(b["d"]), int(b["p"])
        P = np.array(b["axes"], dtype=float).reshape(d, p)
        Pbar = np.array(b["complement"], dtype=float).reshape(p - d, p)
        c = doc["centering"]
        centering = CenteringInfo(c["means"], c["scales"], bool(c["standardized"]))
        r = doc["regression"]
        intercept = np.array(r["intercept"], dtype=float)
        if r["kind"] == "linear":
            reg = LinearRegression(intercept,
                                   np.array(r["coefficients"], dtype=float).reshape(d, p - d))
        elif r["kind"] == "spline":
            bases = tuple(BSplineBasis(int(s["degree"]), int(s["num_basis"]),
                                       np.array(s["knots"], dtype=float)) for s in r["bases"])
            blocks = tuple(np.array(blk, dtype=float).reshape(bb.num_basis, p - d)
                           for blk, bb in zip(r["blocks"], bases))
            reg = AdditiveRegression(intercept, blocks, bases)
        else:
            raise InputError(f"unknown regression kind {r['kind']!r}")
        return SlpcaModel(
            basis=CompletedBasis(P, Pbar),
            regression=reg,
            mu_x=np.array(doc["mu_x"], dtype=float),
            sigma_x=np.array(doc["sigma_x"], dtype=float).reshape(d, d),
            sigma2=float(doc["sigma2"]),
            centering=centering,
            n_train=int(doc["n_train"]),
            column_names=tuple(doc["column_names"]),
            axes_source=b.get("source", "user"),
            log_likelihood=doc.get("log_likelihood"),
            gamma=doc.get("gamma"),
            bic=doc.get("bic"),
            degenerate=bool(doc.get("degenerate", False)),
            seed=doc.get("seed"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed model file: {exc}") from None


def save_model(model: SlpcaModel, path) -> None:
    Path(path).write_text(json.dumps(to_dict(model), indent=1) + "\n", encoding="utf-8")


def load_model(path) -> SlpcaModel:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"model file is not valid JSON: {exc}") from None
    return from_dict(doc)

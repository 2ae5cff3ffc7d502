"""How fast the degenerate objects approach their classical values.

For each expression the degenerate transform at fixed s is computed for a
sweep of lambda values and compared with the lambda = 0 closed form; the
same is done for Gamma_lambda(s) against Gamma(s).  The observed order
log(err_i / err_{i+1}) / log(lam_i / lam_{i+1}) should approach 1.

    python scripts/convergence_study.py --out results/convergence.csv
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from deglap.degenfun import deg_gamma
from deglap.expr import parse
from deglap.numlap import num_transform
from deglap.symlap import transform

log = logging.getLogger("convergence_study")


@dataclass
class StudyConfig:
    exprs: tuple[str, ...] = ("1", "t", "t^3", "t^0.5", "exp_l(-3*t)", "sin_l(2*t)", "cos_l(2*t)", "cosh_l(0.5*t)")
    lams: tuple[float, ...] = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4)
    s: float = 2.0
    gamma_s: tuple[float, ...] = (0.5, 1.5, 2.5)
    numeric: bool = False
    out: Path = field(default_factory=lambda: Path("results/convergence.csv"))


def _degenerate_value(text, lam, s, numeric):
    f = parse(text)
    if numeric:
        return num_transform(f, lam, s).value
    return transform(f, lam).evaluate(s)


def study(cfg: StudyConfig):
    rows = []
    series = {}
    for text in cfg.exprs:
        ref = transform(parse(text), 0.0).evaluate(cfg.s)
        series[text] = [(lam, abs(_degenerate_value(text, lam, cfg.s, cfg.numeric) - ref) / abs(ref)) for lam in cfg.lams]
    for gs in cfg.gamma_s:
        series[f"Gamma({gs:g})"] = [(lam, abs(deg_gamma(lam, gs) - math.gamma(gs)) / math.gamma(gs)) for lam in cfg.lams]
    for name, pts in series.items():
        for i, (lam, err) in enumerate(pts):
            order = ""
            if i:
                lam0, err0 = pts[i - 1]
                order = f"{math.log(err0 / err) / math.log(lam0 / lam):.3f}"
            rows.append({"quantity": name, "lambda": lam, "rel_error": f"{err:.6e}", "observed_order": order})
        monotone = all(b[1] < a[1] for a, b in zip(pts, pts[1:]))
        log.info("%-16s final rel err %.3e  monotone=%s", name, pts[-1][1], monotone)
    return rows


def main(cfg: StudyConfig):
    rows = study(cfg)
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    with cfg.out.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["quantity", "lambda", "rel_error", "observed_order"])
        w.writeheader()
        w.writerows(rows)
    log.info("wrote %d rows to %s", len(rows), cfg.out)


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--s", type=float, default=StudyConfig.s)
    p.add_argument("--numeric", action="store_true", help="use quadrature instead of closed forms")
    p.add_argument("--out", type=Path, default=Path("results/convergence.csv"))
    a = p.parse_args()
    main(StudyConfig(s=a.s, numeric=a.numeric, out=a.out))

"""Run every registered check and write the reports as JSON.

    python scripts/run_verification.py --out results/verification.json --jobs 4
"""

from __future__ import annotations

import argparse
import json
import logging
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from deglap import verify

log = logging.getLogger("run_verification")


@dataclass
class VerificationConfig:
    out: Path = Path("results/verification.json")
    jobs: int = 1
    tol: float | None = None
    checks: tuple[str, ...] = ()


def main(cfg: VerificationConfig) -> int:
    t0 = time.perf_counter()
    reports = verify.run_all(tol=cfg.tol, ids=cfg.checks or None, jobs=cfg.jobs)
    elapsed = time.perf_counter() - t0
    for r in reports:
        flag = "PASS" if r.passed else "FAIL"
        if verify.REGISTRY[r.check_id].informational:
            flag += " (informational)"
        log.info("%-15s %5d cases  max rel err %-10.3g %s", r.check_id, len(r.parameter_grid), r.max_rel_error, flag)
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "config": {k: (str(v) if isinstance(v, Path) else v) for k, v in asdict(cfg).items()},
        "seconds": round(elapsed, 3),
        "reports": [r.to_json() for r in reports],
    }
    cfg.out.write_text(json.dumps(doc, indent=2) + "\n")
    log.info("wrote %s (%.2f s)", cfg.out, elapsed)
    return 0 if verify.all_passed(reports) else 1


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=VerificationConfig.out)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--tol", type=float, default=None, help="override every check tolerance")
    p.add_argument("--check", action="append", default=[], help="restrict to these ids")
    a = p.parse_args()
    raise SystemExit(main(VerificationConfig(a.out, a.jobs, a.tol, tuple(a.check))))

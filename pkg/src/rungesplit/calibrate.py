"""Re-measure the envelope constants on the acceptance grids.

Run ``python -m rungesplit.calibrate`` and compare against the frozen values
in ``data/constants.txt``. Nothing here writes the constants file.
"""

from __future__ import annotations

import json
import sys

from . import checks
from .siegel import pga_analytic_constant

TINY = 1e-300


def measure(workers: int = 1) -> dict:
    _, pga = checks.run_pga(TINY, workers=workers)
    _, llogz = checks.run_llogz(TINY, workers=workers)
    _, pu = checks.run_pu(checks.PU_PRIMES, checks.PU_CS, TINY, TINY, workers=workers)
    _, pana = checks.run_pana(checks.PANA_PRIMES, 10.0, TINY, workers=workers)
    return {
        "S_pga_measured": pga["max_ratio"],
        "S_pga_analytic": pga_analytic_constant(),
        "C0_measured": llogz["max_excess"],
        "S1_measured": pu["max_slack_used_S1"],
        "S2_measured": pu["max_slack_used_S2"],
        "pana_max_shortfall": pana["max_shortfall"],
    }


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    workers = int(argv[0]) if argv else 1
    print(json.dumps(measure(workers), indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

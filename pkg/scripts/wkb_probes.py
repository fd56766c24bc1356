"""Pairing decay at probe points for each catalogued WKB state.

For every probe the table lists the log-log slope, the fitted stretched
exponential rate ``c`` in ``exp(-c / sqrt(h))`` and the detection verdict.
"""

import argparse

from semiwf.appendix_wkb import WkbConfig, wkb_experiment
from semiwf.wavefront import HLadder

CASES = {
    "real_quadratic": [(0.0, 0.0), (0.5, 1.0), (0.5, 0.0)],
    "linear": [(0.0, 1.0), (0.0, 0.0)],
    "imag_flat": [(0.0, 0.0), (0.5, 0.0)],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kmin", type=int, default=4)
    ap.add_argument("--kmax", type=int, default=12)
    ap.add_argument("--counts", type=int, default=9, help="scan cells per axis")
    args = ap.parse_args()
    ladder = HLadder.dyadic(args.kmin, args.kmax)
    for name, probes in CASES.items():
        cfg = WkbConfig(counts=(args.counts, args.counts), probes=probes)
        rep = wkb_experiment(name, cfg, ladder)
        print(f"{name}: sandwich={rep.verdicts['sandwich']}")
        for p in rep.probes:
            f = p["fit"]
            print(f"  probe {tuple(p['point'])}: slope={f['slope']:.3f} stretched_rate={p['stretched_rate']:.3f} "
                  f"class={f['classification']} detected={p['detected']}")


if __name__ == "__main__":
    main()

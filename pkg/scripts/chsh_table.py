"""Correlations, concurrence loss and CHSH values for three coupling ratios."""
import argparse
import math

from chargepair.chsh import classical_bound, table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shots", type=int, default=None)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'Em/EJ':>6} {'phi1/pi':>8} {'phi2/pi':>8} {'dC formula':>11} {'dC direct':>10} "
          f"{'E':>9} {'E counted':>10} {'f':>8}")
    for r in table(shots=args.shots, seed=args.seed):
        ec = "" if r.record.E_counted is None else f"{r.record.E_counted:.5f}"
        print(f"{r.em_over_ej:>6g} {r.phi1 / math.pi:>8.3f} {r.phi2 / math.pi:>8.3f} "
              f"{r.delta_c.formula:>11.5f} {r.delta_c.direct:>10.5f} {r.record.E_theory:>9.5f} "
              f"{ec:>10} {r.f:>8.4f}")
    print(f"local hidden-variable bound: {classical_bound():g}")


if __name__ == "__main__":
    main()

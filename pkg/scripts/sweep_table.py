"""Pivot a sweep CSV into a table of bound totals against empirical distances."""

import argparse
import csv
import sys


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", nargs="?", help="sweep output (stdin when omitted)")
    args = ap.parse_args(argv)

    fh = open(args.csv, newline="") if args.csv else sys.stdin
    with fh:
        rows = list(csv.DictReader(fh))
    print(f"{'index':<26} {'summand':<28} {'bound':<20} {'empirical':>10} {'total':>10} {'ratio':>8}")
    for r in rows:
        metric = r["bound_id"].split(":")[1]
        emp = float(r["d_k_emp"] if metric == "kolmogorov" else r["d_w_emp"])
        total = float(r["bound_total"])
        print(f"{r['index_params']:<26} {r['summand']:<28} {r['bound_id']:<20} {emp:10.6f} {total:10.6f} {total / emp:8.1f}")


if __name__ == "__main__":
    main()

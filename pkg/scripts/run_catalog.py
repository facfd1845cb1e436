"""Run every catalog experiment and print one line per experiment."""

import argparse

from invlab.catalog import catalog_list
from invlab.harness import catalog_config, emit_report, run_many


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="reports")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--filter", default="")
    args = p.parse_args()
    configs = [catalog_config(e.id, name) for e in catalog_list(args.filter) for name in e.experiments]
    for cfg, rec in zip(configs, run_many(configs, args.jobs)):
        emit_report(rec, f"{args.out}/{cfg.function_id}__{cfg.name}.json")
        errs = " ".join(f"{r['sup_error']:.3g}" for r in rec.rows)
        print(f"{cfg.function_id:20s} {cfg.name:22s} {rec.verdict:8s} expected={rec.expected}  {errs}")


if __name__ == "__main__":
    main()

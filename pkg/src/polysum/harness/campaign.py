"""Seeded verification campaigns over many generated instances."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from ..rng import SplitMix64
from .generate import GeneratorConfig, generate
from .io import dumps
from .verify import failed, verify

DEFAULT_COUNTS = (("two_sum", 200), ("unit_column", 200), ("three_sum", 100), ("product", 50))


@dataclass(frozen=True)
class CampaignConfig:
    seed: int = 42
    counts: tuple = DEFAULT_COUNTS
    base: GeneratorConfig = field(default_factory=lambda: GeneratorConfig(n_P=(3, 5), n_Q=(3, 5)))
    workers: int = 1


def instance_configs(cfg: CampaignConfig) -> list[GeneratorConfig]:
    """Per-instance generator configs; seeds come from one stream, kinds in ``counts`` order."""
    rng = SplitMix64(cfg.seed)
    out = []
    for kind, count in cfg.counts:
        for _ in range(count):
            out.append(replace(cfg.base, kind=kind, seed=rng.next_u64()))
    return out


def _run_one(gen_cfg: GeneratorConfig) -> list[dict]:
    inst = generate(gen_cfg)
    records = verify(inst)
    for r in records:
        r["seed"] = gen_cfg.seed
    return records


def run_campaign(cfg: CampaignConfig = CampaignConfig()) -> list[dict]:
    """All records, sorted by instance hash then check name (independent of worker count)."""
    configs = instance_configs(cfg)
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            chunks = list(pool.map(_run_one, configs, chunksize=4))
    else:
        chunks = [_run_one(c) for c in configs]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (r["instance"], r["check"], r["seed"]))
    return records


def jsonl(records) -> str:
    return "".join(dumps(r) + "\n" for r in records)


def summary_csv(records) -> str:
    """Columns: instance hash, check id, pass, walk length, bound value, ratio."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "check", "pass", "walk_length", "bound", "ratio"])
    for r in records:
        s = r["stats"]
        length = s.get("max_length", "")
        bound = s.get("max_bound", s.get("bound", ""))
        ratio = s.get("max_ratio", "")
        w.writerow([r["instance"], r["check"], int(r["passed"]), length, bound, ratio])
    return buf.getvalue()


def summarize(records) -> dict:
    """Per-check totals: instances, cases, failed instances, failed cases."""
    out: dict = {}
    for r in records:
        s = out.setdefault(r["check"], {"instances": 0, "cases": 0, "failed_instances": 0,
                                        "failed_cases": 0, "informational": bool(r.get("informational"))})
        s["instances"] += 1
        s["cases"] += r["cases"]
        s["failed_instances"] += int(not r["passed"])
        s["failed_cases"] += r["failures"]
    return out


def campaign_passed(records) -> bool:
    return not failed(records)

import json
from dataclasses import replace
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polysum.errors import ContractError, GenerationError
from polysum.harness.campaign import (CampaignConfig, instance_configs, jsonl, run_campaign,
                                      summarize, summary_csv)
from polysum.harness.fixtures import FIXTURES, fix1, hypercube, pyramid, pyramid_slice
from polysum.harness.generate import KINDS, GeneratorConfig, generate
from polysum.harness.io import (ProductInstance, content_hash, dumps, instance_from_json,
                                instance_to_json, load_instance, walk_from_json, walk_to_json)
from polysum.harness.oracle import Oracle, oracle_diameter
from polysum.harness.verify import failed, replay, verify, verify_walk
from polysum.polyhedron import (StandardFormSystem, are_adjacent, diameter, enumerate_vertices,
                                is_simple)
from polysum.ratmat import RationalMatrix
from polysum.rng import SplitMix64
from polysum.twosum import connect


def test_splitmix_reference_outputs():
    # published SplitMix64 stream for seed 0
    rng = SplitMix64(0)
    assert [rng.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_randint_range():
    rng = SplitMix64(9)
    draws = [rng.randint(-2, 2) for _ in range(200)]
    assert set(draws) == {-2, -1, 0, 1, 2}
    with pytest.raises(ValueError):
        rng.randint(1, 0)


# ---------------------------------------------------------------- generation

@pytest.mark.parametrize("kind", KINDS)
def test_generation_is_deterministic(kind):
    a = generate(GeneratorConfig(seed=7, kind=kind))
    b = generate(GeneratorConfig(seed=7, kind=kind))
    assert dumps(instance_to_json(a)) == dumps(instance_to_json(b))
    assert content_hash(a) == content_hash(b)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**64 - 1))
def test_require_simple_holds(seed):
    inst = generate(GeneratorConfig(seed=seed, kind="two_sum"))
    assert is_simple(inst.system)


def test_entries_within_bound():
    inst = generate(GeneratorConfig(seed=3, kind="two_sum", entry_bound=2))
    for M in (inst.A, inst.B):
        assert all(abs(v) <= 2 for row in M.tolist() for v in row)


def test_generation_error_carries_stats():
    # a one-column P_A is a single point, so no y-vertex can ever appear
    cfg = GeneratorConfig(seed=1, kind="two_sum", m_P=(1, 1), n_P=(1, 1), max_attempts=20,
                          require_both_categories=True)
    with pytest.raises(GenerationError) as err:
        generate(cfg)
    assert err.value.attempts == 20 and sum(err.value.stats.values()) == 20


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**64 - 1))
def test_product_oracle_diameter_is_sum(seed):
    inst = generate(GeneratorConfig(seed=seed, kind="product", require_simple=False))
    d, _ = oracle_diameter(inst.system)
    assert d == oracle_diameter(inst.P)[0] + oracle_diameter(inst.Q)[0]


# ---------------------------------------------------------------- oracle

def test_oracle_examples():
    simplex = StandardFormSystem(RationalMatrix([[1, 1, 1]]), (F(1),))
    assert oracle_diameter(simplex)[0] == 1
    assert oracle_diameter(hypercube(3))[0] == 3
    # pyramid over an 8-gon and its mid-height slice
    assert oracle_diameter(pyramid())[0] == 2
    assert oracle_diameter(pyramid_slice())[0] == 4


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**64 - 1), st.sampled_from(["two_sum", "three_sum", "unit_column"]))
def test_oracle_agrees_with_polyhedron_module(seed, kind):
    S = generate(GeneratorConfig(seed=seed, kind=kind)).system
    o = Oracle.of(S)
    verts = enumerate_vertices(S)
    assert [v.coords for v in verts] == o.vertices
    for i, u in enumerate(verts):
        for w in verts[i + 1:]:
            assert are_adjacent(S, u, w) == o.adjacent(u.coords, w.coords)


def test_oracle_walk_checker_reasons():
    o = Oracle.of(fix1().system)
    u, v = o.vertices
    assert o.check_walk([u, v]) is None
    assert o.check_walk([]) == "empty walk"
    assert o.check_walk([u, u]) == "steps 0 and 1 are not adjacent"
    assert "not a vertex" in o.check_walk([u, tuple(F(1, 2) for _ in u)])


# ---------------------------------------------------------------- io

@pytest.mark.parametrize("kind", KINDS)
def test_json_round_trip(kind):
    inst = generate(GeneratorConfig(seed=5, kind=kind))
    doc = json.loads(dumps(instance_to_json(inst)))
    assert instance_from_json(doc) == inst


def test_fixtures_round_trip():
    for name, make in FIXTURES.items():
        inst = make()
        assert instance_from_json(instance_to_json(inst)) == inst, name


def test_walk_round_trip():
    w = connect(fix1(), *Oracle.of(fix1().system).vertices)
    assert walk_from_json(walk_to_json(w)).steps == w.steps


def test_load_errors_carry_location(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"A": [[1, 1]],\n "b": [1,]}')
    with pytest.raises(ContractError, match=r"bad\.json:2:"):
        load_instance(bad)
    bad.write_text('{"A": [["1/0"]], "b": ["1"]}')
    with pytest.raises(ContractError, match=r"A\[0\]"):
        load_instance(bad)
    with pytest.raises(ContractError):
        load_instance(tmp_path / "missing.json")


def test_content_hash_ignores_name():
    inst = fix1()
    assert content_hash(inst) == content_hash(replace(inst, name="other"))


# ---------------------------------------------------------------- verify

def test_fix1_all_checks_pass():
    records = verify(fix1())
    assert records and not failed(records)
    assert {r["check"] for r in records} >= {"band_criterion", "theorem_budget", "walk_validity"}


def test_corrupted_rhs_fails_walk_validity():
    inst = fix1()
    walk = connect(inst, *Oracle.of(inst.system).vertices)
    mutated = inst.with_rhs(inst.c_A, inst.c_shared, (F(3),))
    rec = verify_walk(mutated, walk)
    assert not rec["passed"] and rec["witness"]
    w = rec["witness"][0]
    assert w["type"] == "walk" and "not a vertex" in w["reason"]
    assert replay(mutated, w)
    assert not replay(walk.instance, w)


def test_unknown_check_is_rejected():
    with pytest.raises(ValueError):
        verify(fix1(), ["no_such_check"])


def test_product_records():
    inst = generate(GeneratorConfig(seed=2, kind="product"))
    assert isinstance(inst, ProductInstance)
    records = verify(inst)
    assert [r["check"] for r in records] == ["oracle_agreement", "product_identity"]
    assert not failed(records)


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**64 - 1), st.sampled_from(KINDS))
def test_verify_passes_on_generated_instances(seed, kind):
    assert not failed(verify(generate(GeneratorConfig(seed=seed, kind=kind))))


# ---------------------------------------------------------------- campaign

SMALL = CampaignConfig(seed=5, counts=(("two_sum", 2), ("unit_column", 2), ("three_sum", 2),
                                       ("product", 2)))


def test_campaign_seeds_follow_one_stream():
    cfgs = instance_configs(SMALL)
    rng = SplitMix64(5)
    assert [c.seed for c in cfgs] == [rng.next_u64() for _ in range(8)]
    assert [c.kind for c in cfgs] == ["two_sum"] * 2 + ["unit_column"] * 2 + \
        ["three_sum"] * 2 + ["product"] * 2


def test_small_campaign_is_reproducible_and_passes():
    a, b = run_campaign(SMALL), run_campaign(SMALL)
    assert jsonl(a) == jsonl(b)
    assert not failed(a)
    assert all("time" not in key for r in a for key in r)
    summary = summarize(a)
    assert summary["product_identity"]["instances"] == 2
    csv_lines = summary_csv(a).splitlines()
    assert csv_lines[0] == "instance,check,pass,walk_length,bound,ratio"
    assert len(csv_lines) == len(a) + 1


def test_replay_reproduces_recorded_outcome():
    # failing witnesses replay as failures; check that a passing walk is not flagged
    inst = generate(GeneratorConfig(seed=4, kind="two_sum"))
    o = Oracle.of(inst.system)
    u, v = o.vertices[0], o.vertices[-1]
    w = connect(inst, u, v)
    witness = {"type": "walk", "steps": [[str(c) for c in s] for s in w.steps],
               "from": [str(c) for c in u], "to": [str(c) for c in v], "bound": None}
    assert not replay(inst, witness)
    witness["steps"] = witness["steps"][:1]
    if u != v:
        assert replay(inst, witness)


def test_diameter_matches_oracle_on_fixtures():
    for name, make in FIXTURES.items():
        S = make()
        S = S.system if hasattr(S, "system") else S
        assert diameter(S) == oracle_diameter(S)[0], name

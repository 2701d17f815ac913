"""Each ablation flag must produce its structurally expected behavior change
in a mock run; full memory is still persisted for audit."""

import json

import pytest

from proofloop.backend import ScriptedMockBackend
from proofloop.clock import FakeClock
from proofloop.memory import Segment, SharedMemory
from proofloop.orchestrator import RunConfig, RunStatus, run

GROUNDING_FAIL = json.dumps({
    "grounding": {"verdict": "fail", "description": "uncited lemma"},
    "faithfulness": "pass", "gap_free": "pass", "constructiveness": "pass",
})


def run_flagged(fixtures_dir, tmp_path, default_script, flags, extra_entries=(),
                transport=None, name="run", **config_overrides):
    config = RunConfig.from_file(fixtures_dir / "run_config.json")
    config.ablation_flags = set(flags)
    for key, value in config_overrides.items():
        setattr(config, key, value)
    script = {"entries": list(default_script["entries"]) + list(extra_entries)}
    backend = ScriptedMockBackend(script)
    result = run(config, tmp_path / name, clock=FakeClock(), backend=backend,
                 transport=transport)
    memory = SharedMemory.replay(tmp_path / name)
    return result, memory, backend


def test_no_kb_produces_zero_knowledge_records(fixtures_dir, tmp_path, default_script):
    result, memory, backend = run_flagged(fixtures_dir, tmp_path, default_script,
                                          {"no-kb"})
    assert result.status is RunStatus.COMPLETED
    assert memory.snapshot(Segment.KNOWLEDGE_ENTRIES) == []
    assert backend.step_call_count("kb-check-assumption") == 0


def test_no_pa_bypasses_analysis_without_calls(fixtures_dir, tmp_path, default_script):
    result, memory, backend = run_flagged(fixtures_dir, tmp_path, default_script,
                                          {"no-pa"})
    assert result.status is RunStatus.COMPLETED
    rep_records = [r for r in memory.snapshot(Segment.PROBLEM_STATE)
                   if r.content_kind == "problem-representation"]
    assert json.loads(rep_records[0].content)["bypassed"] is True
    for step in ("analysis-gate", "formalize-problem", "decompose-problem",
                 "extract-constraints"):
        assert backend.step_call_count(step) == 0


def test_no_ls_lu_disables_the_literature_pipeline(fixtures_dir, tmp_path,
                                                   default_script):
    result, memory, backend = run_flagged(fixtures_dir, tmp_path, default_script,
                                          {"no-ls-lu"})
    assert result.status is RunStatus.COMPLETED
    assert memory.snapshot(Segment.LITERATURE_CONTEXT) == []
    assert backend.step_call_count("plan-candidates") == 0


def test_init_only_runs_one_round(fixtures_dir, tmp_path, default_script):
    result, memory, _ = run_flagged(fixtures_dir, tmp_path, default_script,
                                    {"init-only"})
    assert result.status is RunStatus.COMPLETED
    assert result.rounds_executed == 1
    assert len(memory.snapshot(Segment.PROOF_STATE)) == 1
    assert memory.snapshot(Segment.FEEDBACK_STATE) == []


def test_init_plus_proposer_drops_all_verification(fixtures_dir, tmp_path,
                                                   default_script):
    result, memory, _ = run_flagged(fixtures_dir, tmp_path, default_script,
                                    {"init-plus-proposer"})
    assert result.status is RunStatus.COMPLETED
    assert len(memory.snapshot(Segment.PROOF_STATE)) == 13  # 1 + 3 * 4
    assert memory.snapshot(Segment.FEEDBACK_STATE) == []


def test_no_assumption_check_uses_entries_unchecked(fixtures_dir, tmp_path,
                                                    default_script):
    result, memory, backend = run_flagged(fixtures_dir, tmp_path, default_script,
                                          {"no-assumption-check"})
    assert result.status is RunStatus.COMPLETED
    kb = json.loads(memory.snapshot(Segment.KNOWLEDGE_ENTRIES)[0].content)
    assert kb["assumption_checked"] is False
    assert kb["excluded"] == []
    assert len(kb["used"]) == 5
    assert backend.step_call_count("kb-check-assumption") == 0


def failing_verifier_entries():
    return [
        {"agent_id": f"verifier-{k}", "round": "*", "step": "verify-commandments",
         "reply": GROUNDING_FAIL}
        for k in (1, 2, 3)
    ]


def strip_verifier_overrides(default_script):
    """Drop the shipped per-round verifier verdicts so injected ones apply."""
    return {"entries": [e for e in default_script["entries"]
                        if not str(e.get("agent_id", "")).startswith("verifier-")]}


def feedback_issue_total(memory):
    total = 0
    for record in memory.snapshot(Segment.FEEDBACK_STATE):
        if record.content_kind == "feedback":
            total += len(json.loads(record.content)["issues"])
    return total


def test_no_validity_disables_the_grounding_rule(fixtures_dir, tmp_path,
                                                 default_script):
    # verifiers flag grounding in every round; the ablation makes that rule moot
    script = strip_verifier_overrides(default_script)
    baseline, memory, _ = run_flagged(fixtures_dir, tmp_path, script, set(),
                                      extra_entries=failing_verifier_entries(),
                                      name="baseline")
    assert feedback_issue_total(memory) == 12  # one grounding issue per feedback
    ablated, memory2, _ = run_flagged(fixtures_dir, tmp_path, script,
                                      {"no-validity"},
                                      extra_entries=failing_verifier_entries(),
                                      name="ablated")
    assert feedback_issue_total(memory2) == 0
    for record in memory2.snapshot(Segment.FEEDBACK_STATE):
        verdicts = json.loads(record.content)["verdicts"]
        assert verdicts["Grounding"] == "Pass"


@pytest.mark.parametrize("flag,rule", [
    ("no-completeness", "GapFree"),
    ("no-rigor", "Faithfulness"),
])
def test_constraint_rule_ablations_force_their_rule_to_pass(
        fixtures_dir, tmp_path, default_script, flag, rule):
    failing = json.dumps({
        "grounding": "pass", "faithfulness": "fail", "gap_free": "fail",
        "constructiveness": "pass",
    })
    entries = [{"agent_id": f"verifier-{k}", "round": "*",
                "step": "verify-commandments", "reply": failing} for k in (1, 2, 3)]
    _, memory, _ = run_flagged(fixtures_dir, tmp_path,
                               strip_verifier_overrides(default_script), {flag},
                               extra_entries=entries, name=flag)
    for record in memory.snapshot(Segment.FEEDBACK_STATE):
        if record.content_kind != "feedback":
            continue
        verdicts = json.loads(record.content)["verdicts"]
        assert verdicts[rule] == "Pass"


# -- literature pipeline ablations (needs real fetches: fake transport) -----------

LIT_ITEMS = json.dumps([
    {"statement": "lemma alpha", "assumptions": [], "conclusion": "c",
     "source_url": "https://fixtures.test/doc1", "pattern_tag": "induction"},
    {"statement": "lemma beta", "assumptions": [], "conclusion": "c",
     "source_url": "https://fixtures.test/doc1", "pattern_tag": "analytic"},
    {"statement": "lemma gamma", "assumptions": [], "conclusion": "c",
     "source_url": "https://fixtures.test/doc1", "pattern_tag": "counting"},
])


def literature_entries():
    return [
        {"agent_id": "initializer", "round": 1, "step": "locate-sources",
         "reply": json.dumps(["https://fixtures.test/doc1"])},
        {"agent_id": "*", "round": "*", "step": "screen-document", "reply": "kept"},
        {"agent_id": "*", "round": "*", "step": "extract-literature",
         "reply": LIT_ITEMS},
        {"agent_id": "*", "round": "*", "step": "filter-literature", "reply": "[0, 2]"},
        {"agent_id": "*", "round": "*", "step": "organize-literature",
         "reply": json.dumps({"0": [0], "1": [2]})},
    ]


def strip_default_locate(default_script):
    return {"entries": [e for e in default_script["entries"]
                        if e.get("step") != "locate-sources"]}


def literature_summary(memory):
    record = memory.snapshot(Segment.LITERATURE_CONTEXT)[0]
    return json.loads(record.content)["summary"]


def fake_transport(url):
    return f"survey text from {url}"


def test_literature_baseline_filters_and_groups(fixtures_dir, tmp_path, default_script):
    _, memory, _ = run_flagged(fixtures_dir, tmp_path,
                               strip_default_locate(default_script), set(),
                               extra_entries=literature_entries(),
                               transport=fake_transport, name="lit-base")
    summary = literature_summary(memory)
    assert len(summary["extracted"]) == 3
    assert summary["retained"] == [0, 2]
    assert summary["groups"] == {"0": [0], "1": [2]}


def test_no_irrelevance_filter_retains_everything(fixtures_dir, tmp_path,
                                                  default_script):
    _, memory, backend = run_flagged(fixtures_dir, tmp_path,
                                     strip_default_locate(default_script),
                                     {"no-irrelevance-filter"},
                                     extra_entries=literature_entries(),
                                     transport=fake_transport, name="lit-nofilter")
    summary = literature_summary(memory)
    assert summary["retained"] == [0, 1, 2]
    assert backend.step_call_count("filter-literature") == 0


def test_no_structured_summary_leaves_groups_empty(fixtures_dir, tmp_path,
                                                   default_script):
    _, memory, backend = run_flagged(fixtures_dir, tmp_path,
                                     strip_default_locate(default_script),
                                     {"no-structured-summary"},
                                     extra_entries=literature_entries(),
                                     transport=fake_transport, name="lit-nosummary")
    summary = literature_summary(memory)
    assert summary["retained"] == [0, 2]
    assert summary["groups"] == {}
    assert backend.step_call_count("organize-literature") == 0


# -- memory organization ablations -------------------------------------------------

def based_on_rounds(memory):
    """round -> set of feedback rounds each proposer revision consumed"""
    out = {}
    for record in memory.snapshot(Segment.PROOF_STATE):
        if record.content_kind != "proof-draft" or record.round < 2:
            continue
        refs = {ref["round"] for ref in json.loads(record.content)["based_on_feedback"]}
        out.setdefault(record.round, set()).update(refs)
    return out


def test_stateless_memory_blinds_agents_to_drafts_and_feedback(
        fixtures_dir, tmp_path, default_script):
    result, memory, _ = run_flagged(fixtures_dir, tmp_path, default_script,
                                    {"stateless-memory"})
    assert result.status is RunStatus.COMPLETED
    # feedback exists on disk, but no revision ever saw any of it
    assert len(memory.snapshot(Segment.FEEDBACK_STATE)) == 12
    assert all(not rounds for rounds in based_on_rounds(memory).values())


def test_last_round_only_restricts_agents_to_the_prior_round(
        fixtures_dir, tmp_path, default_script):
    result, memory, _ = run_flagged(fixtures_dir, tmp_path, default_script,
                                    {"last-round-only"})
    assert result.status is RunStatus.COMPLETED
    refs = based_on_rounds(memory)
    for round_no, rounds_seen in refs.items():
        if round_no == 2:
            assert rounds_seen == set()  # round 1 wrote no feedback
        else:
            assert rounds_seen == {round_no - 1}
    # full history is still persisted for audit
    assert len(memory.snapshot(Segment.PROOF_STATE)) == 13

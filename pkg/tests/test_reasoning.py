import json

import pytest

from proofloop.backend import ScriptedMockBackend
from proofloop.clock import FakeClock
from proofloop.errors import EmptyStatement
from proofloop.gateway import RetrievedDocument, ScreenVerdict
from proofloop.reasoning import (
    KnowledgeEntry,
    ProblemRepresentation,
    analyze_problem,
    kb_check_assumptions,
    kb_query,
    load_bank,
    understand_literature,
)


def scripted(entries, default=None):
    script = {"entries": entries}
    if default is not None:
        script["default_reply"] = default
    return ScriptedMockBackend(script)


# -- problem analysis ----------------------------------------------------------

def analysis_backend():
    return scripted([
        {"agent_id": "initializer", "round": 1, "step": "analysis-gate",
         "reply": "analyze"},
        {"agent_id": "initializer", "round": 1, "step": "formalize-problem",
         "reply": "Show mu_2 >= c/n for connected graphs."},
        {"agent_id": "initializer", "round": 1, "step": "decompose-problem",
         "reply": json.dumps(["goal one", "goal two", "goal three"])},
        {"agent_id": "initializer", "round": 1, "step": "extract-constraints",
         "reply": json.dumps({"explicit": ["connected", "finite degree"],
                              "implicit": ["finite vertex set"]})},
    ])


def test_analysis_produces_three_subgoals_and_two_constraints():
    rep = analyze_problem("prove the bound", analysis_backend())
    assert not rep.bypassed
    assert rep.formal_statement == "Show mu_2 >= c/n for connected graphs."
    assert len(rep.subgoals) == 3
    assert len(rep.explicit_constraints) == 2
    assert rep.implicit_assumptions == ["finite vertex set"]


def test_gate_bypass_passes_raw_statement_through():
    backend = scripted([{"agent_id": "*", "round": "*", "step": "analysis-gate",
                         "reply": "simple, no analysis needed"}])
    rep = analyze_problem("a one-line lemma", backend)
    assert rep.bypassed
    assert rep.subgoals == []
    assert rep.formal_statement == "a one-line lemma"
    assert len(backend.calls) == 1  # only the gate ran


def test_skip_analysis_flag_makes_no_backend_calls():
    backend = scripted([])
    rep = analyze_problem("statement", backend, skip_analysis=True)
    assert rep.bypassed
    assert backend.calls == []


def test_empty_statement_rejected():
    with pytest.raises(EmptyStatement):
        analyze_problem("   \n", scripted([]))


def test_line_based_constraint_fallback():
    backend = scripted([
        {"agent_id": "*", "round": "*", "step": "analysis-gate", "reply": "analyze"},
        {"agent_id": "*", "round": "*", "step": "formalize-problem", "reply": "F"},
        {"agent_id": "*", "round": "*", "step": "decompose-problem",
         "reply": "first goal\nsecond goal"},
        {"agent_id": "*", "round": "*", "step": "extract-constraints",
         "reply": "explicit: G is connected\nimplicit: n is finite"},
    ])
    rep = analyze_problem("x", backend)
    assert rep.subgoals == ["first goal", "second goal"]
    assert rep.explicit_constraints == ["G is connected"]
    assert rep.implicit_assumptions == ["n is finite"]


# -- literature understanding ----------------------------------------------------

def kept_doc(url="https://arxiv.example/1"):
    return RetrievedDocument(url=url, fetched_at=FakeClock().now(),
                             body="lemma bodies", screen_verdict=ScreenVerdict.KEPT)


def literature_backend(retained="[0, 2, 4]"):
    extracted = json.dumps([
        {"statement": f"lemma {i}", "assumptions": ["a"], "conclusion": "c",
         "source_url": "https://arxiv.example/1", "pattern_tag": "induction"}
        for i in range(5)
    ])
    return scripted([
        {"agent_id": "*", "round": "*", "step": "extract-literature", "reply": extracted},
        {"agent_id": "*", "round": "*", "step": "filter-literature", "reply": retained},
        {"agent_id": "*", "round": "*", "step": "organize-literature",
         "reply": json.dumps({"0": [0, 2], "1": [4]})},
    ])


def rep_with_goals():
    return ProblemRepresentation(formal_statement="F", subgoals=["g0", "g1"])


def test_filtering_keeps_three_of_five_and_groups_cover_all():
    summary = understand_literature([kept_doc()], rep_with_goals(), literature_backend())
    assert len(summary.extracted) == 5
    assert summary.retained == [0, 2, 4]
    grouped = {i for members in summary.groups.values() for i in members}
    assert grouped == set(summary.retained)


def test_zero_documents_yield_empty_summary_without_calls():
    backend = scripted([])
    summary = understand_literature([], rep_with_goals(), backend)
    assert summary.extracted == [] and summary.retained == [] and summary.groups == {}
    assert backend.calls == []


def test_filter_disabled_retains_everything():
    enabled = understand_literature([kept_doc()], rep_with_goals(), literature_backend())
    disabled = understand_literature([kept_doc()], rep_with_goals(), literature_backend(),
                                     filter_enabled=False)
    assert disabled.retained == [0, 1, 2, 3, 4]
    assert set(enabled.retained) <= set(disabled.retained)  # monotone under ablation


def test_organize_disabled_leaves_groups_empty():
    summary = understand_literature([kept_doc()], rep_with_goals(), literature_backend(),
                                    organize_enabled=False)
    assert summary.retained == [0, 2, 4]
    assert summary.groups == {}


def test_ungrouped_survivors_attach_to_first_subgoal():
    backend = scripted([
        {"agent_id": "*", "round": "*", "step": "extract-literature",
         "reply": json.dumps([{"statement": "l0"}, {"statement": "l1"}])},
        {"agent_id": "*", "round": "*", "step": "filter-literature", "reply": "[0, 1]"},
        {"agent_id": "*", "round": "*", "step": "organize-literature",
         "reply": json.dumps({"1": [1]})},  # forgets item 0
    ])
    summary = understand_literature([kept_doc()], rep_with_goals(), backend)
    assert 0 in summary.groups.get(0, [])


def test_unscreened_documents_are_refused():
    raw = RetrievedDocument(url="u", fetched_at=FakeClock().now(), body="b")
    with pytest.raises(ValueError):
        understand_literature([raw], rep_with_goals(), scripted([]))


def test_bad_filter_indices_are_ignored():
    backend = scripted([
        {"agent_id": "*", "round": "*", "step": "extract-literature",
         "reply": json.dumps([{"statement": "l0"}, {"statement": "l1"}])},
        {"agent_id": "*", "round": "*", "step": "filter-literature",
         "reply": "[0, 7, -1, \"x\"]"},
        {"agent_id": "*", "round": "*", "step": "organize-literature",
         "reply": json.dumps({"0": [0]})},
    ])
    summary = understand_literature([kept_doc()], rep_with_goals(), backend)
    assert summary.retained == [0]


# -- knowledge bank ----------------------------------------------------------------

def bank_fixture():
    return [
        KnowledgeEntry(id="b-sum", statement="s", tags=("summation", "series")),
        KnowledgeEntry(id="a-conc", statement="s",
                       tags=("concentration-inequality", "tail-bound")),
        KnowledgeEntry(id="c-conc", statement="s",
                       tags=("concentration-inequality",)),
        KnowledgeEntry(id="d-spec", statement="s", tags=("spectral", "eigenvalue")),
    ]


def test_kb_query_ranks_by_overlap_then_id():
    rep = ProblemRepresentation(
        formal_statement="F",
        subgoals=["use a concentration argument with a tail bound"],
    )
    hits = kb_query(rep, bank_fixture())
    assert [e.id for e in hits] == ["a-conc", "c-conc"]  # 2 overlaps, then 1


def test_kb_query_breaks_exact_ties_by_id():
    rep = ProblemRepresentation(formal_statement="F",
                                subgoals=["concentration of measure"])
    hits = kb_query(rep, bank_fixture())
    assert [e.id for e in hits] == ["a-conc", "c-conc"]


def test_kb_query_empty_bank_or_no_overlap():
    rep = ProblemRepresentation(formal_statement="F", subgoals=["category theory"])
    assert kb_query(rep, []) == []
    assert kb_query(rep, bank_fixture()) == []


def test_bypassed_representation_falls_back_to_statement_tokens():
    rep = ProblemRepresentation(
        formal_statement="an eigenvalue and spectral question", bypassed=True
    )
    hits = kb_query(rep, bank_fixture())
    assert [e.id for e in hits] == ["d-spec"]


def test_seed_bank_loads_with_valid_entries():
    bank = load_bank()
    assert len(bank) >= 30
    assert all(len(e.statement) <= 2000 for e in bank)
    assert all(e.tags for e in bank)
    assert len({e.id for e in bank}) == len(bank)


def test_assumption_check_vacuous_for_unconditional_entries():
    entry = KnowledgeEntry(id="e", statement="s")
    backend = scripted([])
    result = kb_check_assumptions(entry, rep_with_goals(), backend)
    assert result.satisfied and result.unmet == []
    assert backend.calls == []


def test_assumption_check_rejects_one_of_two():
    entry = KnowledgeEntry(id="e", statement="s",
                           assumptions=("independence", "bounded support"))
    backend = scripted([
        {"agent_id": "*", "round": "*", "step": "kb-check-assumption",
         "reply": json.dumps({"unmet": [1]})},
    ])
    result = kb_check_assumptions(entry, rep_with_goals(), backend)
    assert not result.satisfied
    assert result.unmet == ["bounded support"]


def test_assumption_check_fails_closed_on_backend_error():
    from proofloop.backend import ModelReply

    class FailingBackend:
        def complete(self, call):
            from proofloop.errors import BackendUnavailable
            raise BackendUnavailable("down")

    entry = KnowledgeEntry(id="e", statement="s", assumptions=("a1", "a2"))
    result = kb_check_assumptions(entry, rep_with_goals(), FailingBackend())
    assert not result.satisfied
    assert result.unmet == ["a1", "a2"]


def test_statement_length_cap_enforced():
    with pytest.raises(ValueError):
        KnowledgeEntry(id="too-long", statement="x" * 2001)

"""Multi-run alternatives: exclusion growth, controllers, stop reasons."""
import pytest

from citescout.agent import (
    AgentDecidesController,
    ExcerptTask,
    FixedRunsController,
    InteractiveController,
    Session,
    run_alternatives,
)
from citescout.corpus import LocalCorpus
from citescout.gateway import ModelProfile, ScriptedGateway

from conftest import (
    BANDIT_ID,
    DEEPSEEK_EXCERPT,
    DEEPSEEK_RESPONSES,
    PETS_2011_ID,
    PETS_2012_ID,
    make_paper,
)

PROFILE = ModelProfile(name="scripted-test", endpoint="scripted")


def search_then_select(query: str, paper_id: str) -> list[str]:
    return [
        f'{{"reason": "search first", "action": {{"name": "search_relevance", "query": "{query}"}}}}',
        f'{{"reason": "that one", "action": {{"name": "select", "paper_id": "{paper_id}"}}}}',
    ]


def test_fixed_single_run(demo_corpus):
    session = Session(
        corpus=demo_corpus, gateway=ScriptedGateway(DEEPSEEK_RESPONSES), profile=PROFILE
    )
    result = run_alternatives(
        session,
        ExcerptTask(item_id="bandits", excerpt=DEEPSEEK_EXCERPT),
        FixedRunsController(1),
    )
    assert result.suggestions == [BANDIT_ID]
    assert result.stop_reason == "run_limit"
    assert len(result.trajectories) == 1


def test_fixed_three_runs_accumulate_without_duplicates():
    papers = [
        make_paper(pid, f"triangular matrix factorization variant {pid}", citation_count=i)
        for i, pid in enumerate(["alpha", "beta", "gamma"])
    ]
    responses = (
        search_then_select("triangular matrix", "alpha")
        + search_then_select("triangular matrix", "beta")
        + search_then_select("triangular matrix", "gamma")
    )
    session = Session(
        corpus=LocalCorpus(papers), gateway=ScriptedGateway(responses), profile=PROFILE
    )
    result = run_alternatives(
        session,
        ExcerptTask(item_id="x", excerpt="factorization [CITATION]"),
        FixedRunsController(3),
    )
    assert result.suggestions == ["alpha", "beta", "gamma"]
    assert len(set(result.suggestions)) == 3
    # the second run's system prompt announces the first exclusion
    second_system = result.trajectories[1].messages[0].content
    assert "alpha" in second_system or "triangular matrix factorization variant alpha" in second_system
    assert result.trajectories[1].meta["exclusions"] == ["alpha"]
    assert result.trajectories[2].meta["exclusions"] == ["alpha", "beta"]


def test_pets_fixture_run2_selects_alternative(demo_corpus):
    responses = (
        search_then_select("cats dogs dataset", PETS_2012_ID)
        + search_then_select("cats dogs dataset", PETS_2011_ID)
    )
    session = Session(
        corpus=demo_corpus, gateway=ScriptedGateway(responses), profile=PROFILE
    )
    task = ExcerptTask(
        item_id="pets",
        excerpt="...Flowers102 [56], OxfordPets [CITATION], Food101 [7]...",
    )
    result = run_alternatives(session, task, FixedRunsController(2))
    assert result.suggestions == [PETS_2012_ID, PETS_2011_ID]
    second_system = result.trajectories[1].messages[0].content
    assert '"Cats and dogs"' in second_system


def test_failed_run_contributes_no_suggestion(demo_corpus):
    responses = (
        ['{"reason": "stuck", "action": {"name": "give_up"}}']
        + DEEPSEEK_RESPONSES
    )
    session = Session(
        corpus=demo_corpus, gateway=ScriptedGateway(responses), profile=PROFILE
    )
    result = run_alternatives(
        session,
        ExcerptTask(item_id="bandits", excerpt=DEEPSEEK_EXCERPT),
        FixedRunsController(2),
    )
    assert result.suggestions == [BANDIT_ID]
    assert len(result.trajectories) == 2
    assert result.trajectories[0].terminal.kind == "gave_up"


def test_interactive_controller_stop_reason(demo_corpus):
    session = Session(
        corpus=demo_corpus, gateway=ScriptedGateway(DEEPSEEK_RESPONSES), profile=PROFILE
    )
    printed = []
    controller = InteractiveController(ask=lambda prompt: "n", out=printed.append)
    result = run_alternatives(
        session,
        ExcerptTask(item_id="bandits", excerpt=DEEPSEEK_EXCERPT),
        controller,
    )
    assert result.stop_reason == "user_stop"
    assert result.suggestions == [BANDIT_ID]
    assert printed  # the operator saw the suggestion list


def test_agent_decides_controller(demo_corpus):
    # run 1 selects, then the model is asked and answers "No." -> agent_stop
    gateway = ScriptedGateway(DEEPSEEK_RESPONSES + ["No."])
    session = Session(corpus=demo_corpus, gateway=gateway, profile=PROFILE)
    controller = AgentDecidesController(gateway, PROFILE)
    result = run_alternatives(
        session,
        ExcerptTask(item_id="bandits", excerpt=DEEPSEEK_EXCERPT),
        controller,
    )
    assert result.stop_reason == "agent_stop"
    assert result.suggestions == [BANDIT_ID]


def test_run_limit_bounds_alternatives(demo_corpus):
    responses = DEEPSEEK_RESPONSES + ['{"reason": "stop", "action": {"name": "give_up"}}'] * 2
    session = Session(
        corpus=demo_corpus, gateway=ScriptedGateway(responses), profile=PROFILE
    )
    controller = FixedRunsController(5)
    result = run_alternatives(
        session,
        ExcerptTask(item_id="bandits", excerpt=DEEPSEEK_EXCERPT),
        controller,
        max_runs=3,
    )
    assert result.stop_reason == "run_limit"
    assert len(result.trajectories) == 3


def test_fixed_controller_rejects_zero_runs():
    with pytest.raises(ValueError):
        FixedRunsController(0)

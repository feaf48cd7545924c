"""The citation-search loop: complete, parse, dispatch, repeat.

One run is strictly sequential: each model call yields one turn holding the
model's reasoning, the single parsed action, and the rendered observation.
Invalid responses (unparseable, unavailable action, select of an unseen or
excluded paper) never advance the search state; they consume a step and
feed a corrective observation back to the model. A run terminates on
select, give_up, the step limit, or an unrecoverable endpoint failure.

Trajectories serialize to JSON with stable field names and reproduce every
prompt the model saw byte-for-byte (see rebuild_messages).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from ..corpus import CorpusBackend, Query, SearchResultSet, Snippet
from ..errors import (
    BackendUnavailable,
    ContextOverflow,
    CorpusError,
    EmptyQuery,
    EndpointError,
    ExcerptNotFound,
    FullTextUnavailable,
    MalformedArguments,
    MultipleActions,
    NoAction,
    ParseError,
    UnknownPaper,
)
from ..gateway import (
    ChatMessage,
    CompletionUsage,
    Gateway,
    ModelProfile,
    ROLE_ASSISTANT,
    ROLE_SYSTEM,
    ROLE_USER,
)
from . import actions as act
from .actions import ActionRequest, parse_turn
from .prompts import (
    PromptConfig,
    assemble_system_prompt,
    build_task_message,
    exclusion_addendum,
)

TERMINAL_SELECTED = "selected"
TERMINAL_GAVE_UP = "gave_up"
TERMINAL_STEP_LIMIT = "step_limit"
TERMINAL_ERROR = "error"

NO_RESULTS_MESSAGE = (
    "No results found. Try a simpler, more general query with fewer words "
    "(around 3), or search by text snippets instead."
)
ELIDED_OBSERVATION = "[earlier observation elided to fit the context window]"


@dataclass(frozen=True)
class ExcerptTask:
    """One excerpt to ground: the unit of work for a run."""

    item_id: str
    excerpt: str
    source_title: str | None = None
    source_paper_id: str | None = None


@dataclass(frozen=True)
class Limits:
    max_steps: int = 20
    page_size: int = 10
    context_radius: int = 3


@dataclass
class AgentTurn:
    reason: str
    action: ActionRequest | None
    observation: str
    usage: CompletionUsage
    raw: str
    error: str | None = None


@dataclass
class Terminal:
    kind: str
    paper_id: str | None = None
    detail: str | None = None


@dataclass
class Trajectory:
    excerpt_ref: str
    run_index: int
    turns: list[AgentTurn]
    terminal: Terminal
    total_usage: CompletionUsage
    messages: list[ChatMessage]
    elisions: list[int] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def history_length(self) -> int:
        return len(self.messages)

    @property
    def selected_paper_id(self) -> str | None:
        return self.terminal.paper_id if self.terminal.kind == TERMINAL_SELECTED else None


@dataclass
class Session:
    """Shared run dependencies; safe to reuse across sequential runs."""

    corpus: CorpusBackend
    gateway: Gateway
    profile: ModelProfile
    prompt_config: PromptConfig = field(default_factory=PromptConfig)
    limits: Limits = field(default_factory=Limits)
    year_cutoff: int | None = None


# -- observation rendering -----------------------------------------------------


def render_paper_results(results: SearchResultSet) -> str:
    """Numbered list of paper hits; citation counts shown for citation sort."""
    if not results.hits:
        return NO_RESULTS_MESSAGE
    show_citations = results.mode == "citation_count"
    blocks = []
    for i, hit in enumerate(results.hits, 1):
        lines = [f"{i}. Paper ID: {hit.paper_id}", f"   Title: {hit.title}"]
        if hit.year is not None:
            lines.append(f"   Year: {hit.year}")
        if show_citations and hit.citation_count is not None:
            lines.append(f"   Citations: {hit.citation_count}")
        lines.append(f"   Abstract: {hit.text}")
        blocks.append("\n".join(lines))
    return "\n".join(blocks)


def render_in_paper_results(results: SearchResultSet) -> str:
    """Exactly one line per hit."""
    if not results.hits:
        return NO_RESULTS_MESSAGE
    lines = []
    for i, hit in enumerate(results.hits, 1):
        prefix = f"[{hit.section}] " if hit.section else ""
        lines.append(f"{i}. {prefix}{hit.text}")
    return "\n".join(lines)


def render_snippet_results(results: SearchResultSet) -> str:
    if not results.hits:
        return NO_RESULTS_MESSAGE
    blocks = []
    for hit in results.hits:
        blocks.append(
            f"- Title: {hit.title}\n"
            f"  Section: {hit.section or 'Body'}\n"
            f"  Snippet: {hit.text}"
        )
    return "\n".join(blocks)


def render_context_window(window: list[Snippet]) -> str:
    """Section headings interleaved with snippet text, in document order."""
    lines: list[str] = []
    current = None
    for snippet in window:
        if snippet.section and snippet.section != current:
            lines.append(snippet.section)
            current = snippet.section
        lines.append(snippet.text)
    return "\n".join(lines)


_CORRECTIVE = {
    NoAction: (
        "Could not parse an action from your response. Respond with a single "
        'JSON object: {"reason": "...", "action": {"name": "...", ...}}.'
    ),
    MultipleActions: (
        "Your response contained more than one action. You must include exactly "
        "one action in your responses."
    ),
    MalformedArguments: "Your action carried the wrong arguments.",
}


def corrective_observation(error: ParseError) -> str:
    base = _CORRECTIVE[type(error)]
    return f"{base} ({error})"


# -- dispatch -------------------------------------------------------------------


def dispatch(
    action: ActionRequest, session: Session, task: ExcerptTask,
    exclusions: frozenset[str] = frozenset(),
) -> tuple[str, set[str]]:
    """Run one non-select action against the corpus.

    Returns the rendered observation plus the paper ids the observation
    reveals (eligible for a later select). Corpus failures come back as
    in-band guidance so the model can adapt.
    """
    corpus = session.corpus
    limit = session.limits.page_size
    revealed: set[str] = set()

    def query(text: str) -> Query:
        return Query(
            text=text,
            year_cutoff=session.year_cutoff,
            excluded_paper_ids=exclusions,
        )

    try:
        if action.name == act.SEARCH_RELEVANCE:
            results = corpus.search_relevance(query(action["query"]), limit)
            revealed = {hit.paper_id for hit in results.hits}
            return render_paper_results(results), revealed
        if action.name == act.SEARCH_CITATION_COUNT:
            results = corpus.search_citation_count(query(action["query"]), limit)
            revealed = {hit.paper_id for hit in results.hits}
            return render_paper_results(results), revealed
        if action.name == act.FIND_IN_TEXT:
            results = corpus.find_in_text(action["paper_id"], query(action["query"]), limit)
            return render_in_paper_results(results), revealed
        if action.name == act.SEARCH_TEXT_SNIPPET:
            # titles only: the model is expected to search by title afterwards
            results = corpus.search_text_snippet(query(action["query"]), limit)
            return render_snippet_results(results), revealed
        if action.name == act.ASK_FOR_MORE_CONTEXT:
            if not task.source_paper_id:
                return (
                    "The source paper is not available, so no additional context "
                    "can be retrieved. Proceed with the excerpt as given.",
                    revealed,
                )
            window = corpus.get_context(
                action["query"], task.source_paper_id, session.limits.context_radius
            )
            return render_context_window(window), revealed
        if action.name == act.READ:
            text = corpus.read_full(action["paper_id"])
            references = corpus.get_references(action["paper_id"])
            if references:
                ref_lines = "\n".join(
                    f"- {title} (paper_id: {pid})" for pid, title in references
                )
                text = f"{text}\nReferences:\n{ref_lines}"
                revealed = {pid for pid, _ in references}
            return text, revealed
    except EmptyQuery:
        return "Your query was empty. Provide a short keyword query.", revealed
    except UnknownPaper:
        return (
            "That paper ID does not exist in the database. Use a paper ID from "
            "your search results.",
            revealed,
        )
    except FullTextUnavailable:
        return (
            "The full text of that paper is not available. Fall back to another "
            "action, for example search by text snippets.",
            revealed,
        )
    except ExcerptNotFound:
        return (
            "No additional context could be retrieved for this excerpt. Proceed "
            "with the excerpt as given.",
            revealed,
        )
    except BackendUnavailable:
        return (
            "The paper database is temporarily unavailable. Try the action again.",
            revealed,
        )
    raise ValueError(f"dispatch does not handle action {action.name!r}")


# -- the loop -------------------------------------------------------------------


def run_session(
    session: Session,
    task: ExcerptTask,
    run_index: int = 0,
    exclusions: frozenset[str] = frozenset(),
    on_turn: Callable[[AgentTurn], None] | None = None,
) -> Trajectory:
    excluded_titles = _resolve_titles(session.corpus, exclusions)
    system_text = assemble_system_prompt(session.prompt_config)
    if excluded_titles:
        system_text = f"{system_text}\n\n{exclusion_addendum(excluded_titles)}"
    task_text = build_task_message(task.excerpt, task.source_title)
    messages = [
        ChatMessage(ROLE_SYSTEM, system_text),
        ChatMessage(ROLE_USER, task_text),
    ]
    turns: list[AgentTurn] = []
    elisions: list[int] = []
    seen: set[str] = set()
    total = CompletionUsage(provider_reported=True)
    terminal: Terminal | None = None

    while terminal is None and len(turns) < session.limits.max_steps:
        try:
            raw, usage = _complete_with_truncation(session, messages, elisions)
        except EndpointError as exc:
            terminal = Terminal(TERMINAL_ERROR, detail=f"endpoint: {exc}")
            break
        except ContextOverflow as exc:
            terminal = Terminal(TERMINAL_ERROR, detail=f"context_overflow: {exc}")
            break
        total = total + usage
        messages.append(ChatMessage(ROLE_ASSISTANT, raw))

        observation = ""
        turn_action: ActionRequest | None = None
        error: str | None = None
        reason = ""
        try:
            reason, parsed = parse_turn(raw)
        except ParseError as exc:
            observation = corrective_observation(exc)
            error = type(exc).__name__
        else:
            if parsed.name not in session.prompt_config.actions:
                available = ", ".join(session.prompt_config.actions)
                observation = (
                    f"The action {parsed.name!r} is not available. "
                    f"Available actions: {available}."
                )
                error = "UnavailableAction"
            elif parsed.name == act.SELECT:
                paper_id = parsed["paper_id"]
                if paper_id in exclusions:
                    observation = (
                        f"Paper {paper_id} was already suggested for this excerpt "
                        "and is excluded. Select a different paper."
                    )
                    error = "ExcludedSelect"
                elif paper_id not in seen:
                    observation = (
                        f"Paper {paper_id} has not appeared in any of your search "
                        "results. Search first, then select."
                    )
                    error = "InvalidSelect"
                else:
                    turn_action = parsed
                    observation = f"Selected paper {paper_id}."
                    terminal = Terminal(TERMINAL_SELECTED, paper_id=paper_id)
            elif parsed.name == act.GIVE_UP:
                turn_action = parsed
                observation = "Gave up without a selection."
                terminal = Terminal(TERMINAL_GAVE_UP)
            else:
                turn_action = parsed
                observation, revealed = dispatch(parsed, session, task, exclusions)
                seen |= revealed

        turn = AgentTurn(
            reason=reason if not error else (reason or raw),
            action=turn_action,
            observation=observation,
            usage=usage,
            raw=raw,
            error=error,
        )
        turns.append(turn)
        if on_turn is not None:
            on_turn(turn)
        if terminal is None:
            messages.append(ChatMessage(ROLE_USER, observation))

    if terminal is None:
        terminal = Terminal(TERMINAL_STEP_LIMIT)

    return Trajectory(
        excerpt_ref=task.item_id,
        run_index=run_index,
        turns=turns,
        terminal=terminal,
        total_usage=total,
        messages=messages,
        elisions=elisions,
        meta={
            "model": session.profile.name,
            "actions": list(session.prompt_config.actions),
            "exclusions": sorted(exclusions),
            "excluded_titles": excluded_titles,
            "excerpt": task.excerpt,
            "source_title": task.source_title,
            "source_paper_id": task.source_paper_id,
        },
    )


def _resolve_titles(corpus: CorpusBackend, paper_ids: frozenset[str]) -> list[str]:
    titles = []
    for paper_id in sorted(paper_ids):
        try:
            titles.append(corpus.get_paper(paper_id).title)
        except CorpusError:
            titles.append(paper_id)
    return titles


def _complete_with_truncation(
    session: Session, messages: list[ChatMessage], elisions: list[int]
) -> tuple[str, CompletionUsage]:
    """Call the gateway, eliding oldest observation bodies on overflow.

    Only user-role observation messages (index >= 2) are elided; assistant
    action lines and the task message are preserved.
    """
    while True:
        try:
            return session.gateway.complete(session.profile, messages)
        except ContextOverflow:
            for i in range(2, len(messages)):
                if messages[i].role == ROLE_USER and messages[i].content != ELIDED_OBSERVATION:
                    messages[i] = ChatMessage(ROLE_USER, ELIDED_OBSERVATION)
                    elisions.append(i)
                    break
            else:
                raise


# -- serialization ---------------------------------------------------------------


def trajectory_to_dict(trajectory: Trajectory) -> dict:
    return {
        "excerpt_ref": trajectory.excerpt_ref,
        "run_index": trajectory.run_index,
        "terminal": {
            "kind": trajectory.terminal.kind,
            "paper_id": trajectory.terminal.paper_id,
            "detail": trajectory.terminal.detail,
        },
        "total_usage": _usage_to_dict(trajectory.total_usage),
        "turns": [
            {
                "reason": turn.reason,
                "action": (
                    {"name": turn.action.name, "arguments": turn.action.arguments}
                    if turn.action
                    else None
                ),
                "observation": turn.observation,
                "usage": _usage_to_dict(turn.usage),
                "raw": turn.raw,
                "error": turn.error,
            }
            for turn in trajectory.turns
        ],
        "messages": [
            {"role": m.role, "content": m.content} for m in trajectory.messages
        ],
        "elisions": list(trajectory.elisions),
        "meta": trajectory.meta,
    }


def trajectory_from_dict(data: dict) -> Trajectory:
    return Trajectory(
        excerpt_ref=data["excerpt_ref"],
        run_index=data["run_index"],
        turns=[
            AgentTurn(
                reason=row["reason"],
                action=(
                    ActionRequest(row["action"]["name"], dict(row["action"]["arguments"]))
                    if row["action"]
                    else None
                ),
                observation=row["observation"],
                usage=_usage_from_dict(row["usage"]),
                raw=row["raw"],
                error=row.get("error"),
            )
            for row in data["turns"]
        ],
        terminal=Terminal(
            kind=data["terminal"]["kind"],
            paper_id=data["terminal"].get("paper_id"),
            detail=data["terminal"].get("detail"),
        ),
        total_usage=_usage_from_dict(data["total_usage"]),
        messages=[ChatMessage(m["role"], m["content"]) for m in data["messages"]],
        elisions=list(data.get("elisions", [])),
        meta=data.get("meta", {}),
    )


def save_trajectory(trajectory: Trajectory, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(trajectory_to_dict(trajectory), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )


def load_trajectory(path: str | Path) -> Trajectory:
    with open(path, encoding="utf-8") as fh:
        return trajectory_from_dict(json.load(fh))


def rebuild_messages(trajectory: Trajectory) -> list[ChatMessage]:
    """Re-render every prompt of a serialized run from its turns and config.

    Byte-equal to trajectory.messages; the replayability check for audits.
    """
    meta = trajectory.meta
    config = PromptConfig(actions=tuple(meta["actions"]))
    system_text = assemble_system_prompt(config)
    if meta.get("excluded_titles"):
        system_text = f"{system_text}\n\n{exclusion_addendum(meta['excluded_titles'])}"
    messages = [
        ChatMessage(ROLE_SYSTEM, system_text),
        ChatMessage(ROLE_USER, build_task_message(meta["excerpt"], meta.get("source_title"))),
    ]
    terminal_kinds = {TERMINAL_SELECTED, TERMINAL_GAVE_UP}
    for i, turn in enumerate(trajectory.turns):
        messages.append(ChatMessage(ROLE_ASSISTANT, turn.raw))
        is_last = i == len(trajectory.turns) - 1
        if not (is_last and trajectory.terminal.kind in terminal_kinds):
            messages.append(ChatMessage(ROLE_USER, turn.observation))
    for index in trajectory.elisions:
        messages[index] = ChatMessage(ROLE_USER, ELIDED_OBSERVATION)
    return messages


def _usage_to_dict(usage: CompletionUsage) -> dict:
    return {
        "input_tokens": usage.input_tokens,
        "output_tokens": usage.output_tokens,
        "provider_reported": usage.provider_reported,
    }


def _usage_from_dict(data: dict) -> CompletionUsage:
    return CompletionUsage(
        input_tokens=data["input_tokens"],
        output_tokens=data["output_tokens"],
        provider_reported=data["provider_reported"],
    )

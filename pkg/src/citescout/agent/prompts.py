"""System and task prompt assembly from template assets."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..errors import MissingAsset
from . import actions as act

_ASSET_DIR = Path(__file__).parent / "assets"

DEFAULT_ACTIONS: tuple[str, ...] = (
    act.SEARCH_RELEVANCE,
    act.SEARCH_CITATION_COUNT,
    act.SELECT,
    act.FIND_IN_TEXT,
    act.ASK_FOR_MORE_CONTEXT,
    act.SEARCH_TEXT_SNIPPET,
    act.GIVE_UP,
)

READ_MODE_ACTIONS: tuple[str, ...] = tuple(
    act.READ if name == act.FIND_IN_TEXT else name for name in DEFAULT_ACTIONS
)

_ACTION_DESCRIPTIONS = {
    act.SEARCH_RELEVANCE: (
        "Search paper titles and abstracts, results sorted by relevance. "
        'Arguments: "query".'
    ),
    act.SEARCH_CITATION_COUNT: (
        "Search paper titles and abstracts, results sorted by citation count. "
        'Arguments: "query".'
    ),
    act.SELECT: (
        "Select a paper from your search results as your final answer. "
        'Arguments: "paper_id".'
    ),
    act.FIND_IN_TEXT: (
        "Search for a query string within the full text of a paper from your "
        'search results. Arguments: "paper_id", "query".'
    ),
    act.ASK_FOR_MORE_CONTEXT: (
        "Retrieve the surrounding context of the excerpt from its source paper. "
        'Arguments: "query" (the excerpt), "paper_title" (the source paper title).'
    ),
    act.SEARCH_TEXT_SNIPPET: (
        'Search for a query string in the full text of all papers. Arguments: "query".'
    ),
    act.READ: (
        "Read the entire full text of a paper from your search results. "
        'Arguments: "paper_id".'
    ),
    act.GIVE_UP: (
        "Stop without an answer, only when you are sure no paper in the database "
        "fits. No arguments."
    ),
}

_FEWSHOT_ASSETS = {
    act.ASK_FOR_MORE_CONTEXT: "fewshot_ask_for_more_context.txt",
    act.FIND_IN_TEXT: "fewshot_find_in_text.txt",
    act.SEARCH_TEXT_SNIPPET: "fewshot_search_text_snippet.txt",
    act.READ: "fewshot_read.txt",
}


@dataclass(frozen=True)
class PromptConfig:
    """Which actions the agent is offered; drives prompt text and dispatch."""

    actions: tuple[str, ...] = DEFAULT_ACTIONS

    def __post_init__(self):
        if not self.actions:
            raise ValueError("action set must be non-empty")
        unknown = [name for name in self.actions if name not in act.ACTION_SPECS]
        if unknown:
            raise ValueError(f"unknown actions: {unknown}")
        if act.SELECT not in self.actions:
            raise ValueError("action set must include select")

    @classmethod
    def read_mode(cls) -> "PromptConfig":
        """Whole-paper reading in place of targeted in-paper search."""
        return cls(actions=READ_MODE_ACTIONS)


def load_asset(name: str) -> str:
    path = _ASSET_DIR / name
    if not path.is_file():
        raise MissingAsset(f"prompt asset {name!r} not found at {path}")
    return path.read_text(encoding="utf-8")


def assemble_system_prompt(config: PromptConfig = PromptConfig()) -> str:
    """Render the system prompt for the configured action set. Deterministic."""
    template = load_asset("system_prompt.txt")
    action_list = "\n".join(
        f"{i}. {name}: {_ACTION_DESCRIPTIONS[name]}"
        for i, name in enumerate(config.actions, 1)
    )
    examples = []
    for name in config.actions:
        asset = _FEWSHOT_ASSETS.get(name)
        if asset:
            examples.append(load_asset(asset).strip())
    example_block = ("\n\n" + "\n\n".join(examples)) if examples else ""
    return (
        template.replace("{{ACTION_LIST}}", action_list)
        .replace("{{EXAMPLES}}", example_block)
        .strip()
    )


def build_task_message(excerpt: str, source_title: str | None = None) -> str:
    """The first user message: task instructions plus the excerpt."""
    template = load_asset("task_message.txt")
    if source_title:
        block = f'The excerpt is from paper title "{source_title}":\n{excerpt}'
    else:
        block = excerpt
    return template.replace("{{EXCERPT_BLOCK}}", block).strip()


def exclusion_addendum(titles: list[str]) -> str:
    """One-line system-prompt addendum listing already-suggested papers."""
    joined = "; ".join(f'"{title}"' for title in titles)
    return (
        f"Already-suggested papers that you must NOT select again: {joined}. "
        "Find a different appropriate reference."
    )

"""Prompt assembly: action filtering, stability, assets."""
import pytest

from citescout.agent import (
    PromptConfig,
    assemble_system_prompt,
    build_task_message,
    exclusion_addendum,
)
from citescout.agent import prompts
from citescout.errors import MissingAsset


def test_default_prompt_contains_short_query_guidance():
    text = assemble_system_prompt()
    assert "around 3" in text
    assert "fewer words" in text
    assert "exactly one action" in text


def test_default_prompt_lists_default_actions_only():
    text = assemble_system_prompt()
    assert "find_in_text:" in text
    assert "read:" not in text


def test_read_mode_swaps_in_paper_action():
    text = assemble_system_prompt(PromptConfig.read_mode())
    assert "read:" in text
    assert "find_in_text:" not in text


def test_prompt_byte_stable():
    config = PromptConfig()
    assert assemble_system_prompt(config) == assemble_system_prompt(config)


def test_fewshot_blocks_follow_action_set():
    default = assemble_system_prompt()
    assert "ask_for_more_context" in default
    assert "Spatial Pyramid Pooling" in default  # snippet-search example
    read_mode = assemble_system_prompt(PromptConfig.read_mode())
    assert "full text of the paper" in read_mode


def test_action_set_must_include_select():
    with pytest.raises(ValueError):
        PromptConfig(actions=("search_relevance",))
    with pytest.raises(ValueError):
        PromptConfig(actions=())
    with pytest.raises(ValueError):
        PromptConfig(actions=("select", "warp"))


def test_task_message_embeds_excerpt_and_title():
    text = build_task_message("Some excerpt [CITATION].", "A Source Paper")
    assert 'The excerpt is from paper title "A Source Paper":' in text
    assert text.endswith("Some excerpt [CITATION].")
    untitled = build_task_message("Some excerpt [CITATION].")
    assert "from paper title" not in untitled


def test_exclusion_addendum_lists_titles():
    line = exclusion_addendum(["Cats and dogs", "Another Paper"])
    assert '"Cats and dogs"' in line
    assert '"Another Paper"' in line
    assert "NOT" in line


def test_missing_asset_raises(monkeypatch, tmp_path):
    monkeypatch.setattr(prompts, "_ASSET_DIR", tmp_path)
    with pytest.raises(MissingAsset):
        assemble_system_prompt()

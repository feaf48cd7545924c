"""Append-only on-disk persistence for review sessions.

Layout: one directory per session under the store root:

    {root}/{session_id}/config.json     session creation payload
    {root}/{session_id}/state.json      latest handle state (atomic replace)
    {root}/{session_id}/turns.jsonl     one line per turn, appended live
    {root}/{session_id}/decisions.jsonl one line per steering decision
    {root}/{session_id}/runs/{k}.json   full trajectory per run
    {root}/annotations.jsonl            accept verdicts, grouped per item
"""
from __future__ import annotations

import json
import os
from pathlib import Path


class SessionStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def session_dir(self, session_id: str) -> Path:
        return self.root / session_id

    def create(self, session_id: str, config: dict) -> None:
        directory = self.session_dir(session_id)
        directory.mkdir(parents=True, exist_ok=False)
        (directory / "runs").mkdir()
        self._write_json(directory / "config.json", config)

    def list_sessions(self) -> list[str]:
        return sorted(
            entry.name
            for entry in self.root.iterdir()
            if entry.is_dir() and (entry / "state.json").is_file()
        )

    def save_state(self, session_id: str, state: dict) -> None:
        self._write_json(self.session_dir(session_id) / "state.json", state)

    def load_state(self, session_id: str) -> dict:
        return self._read_json(self.session_dir(session_id) / "state.json")

    def load_config(self, session_id: str) -> dict:
        return self._read_json(self.session_dir(session_id) / "config.json")

    def append_turn(self, session_id: str, row: dict) -> None:
        self._append_jsonl(self.session_dir(session_id) / "turns.jsonl", row)

    def load_turns(self, session_id: str) -> list[dict]:
        return self._read_jsonl(self.session_dir(session_id) / "turns.jsonl")

    def append_decision(self, session_id: str, row: dict) -> None:
        self._append_jsonl(self.session_dir(session_id) / "decisions.jsonl", row)

    def load_decisions(self, session_id: str) -> list[dict]:
        return self._read_jsonl(self.session_dir(session_id) / "decisions.jsonl")

    def save_trajectory(self, session_id: str, run_index: int, data: dict) -> None:
        path = self.session_dir(session_id) / "runs" / f"{run_index}.json"
        self._write_json(path, data)

    def load_trajectory(self, session_id: str, run_index: int) -> dict:
        return self._read_json(
            self.session_dir(session_id) / "runs" / f"{run_index}.json"
        )

    def rebuild_annotations(self) -> Path:
        """Regenerate annotations.jsonl from every session's accept verdicts."""
        accepted: dict[str, list[str]] = {}
        for session_id in self.list_sessions():
            state = self.load_state(session_id)
            item_id = state.get("item_id", session_id)
            for row in self.load_decisions(session_id):
                if row.get("verdict") == "accept" and row.get("paper_id"):
                    bucket = accepted.setdefault(item_id, [])
                    if row["paper_id"] not in bucket:
                        bucket.append(row["paper_id"])
        path = self.root / "annotations.jsonl"
        lines = [
            json.dumps(
                {"item_id": item_id, "human_paper_ids": ids}, ensure_ascii=False
            )
            for item_id, ids in sorted(accepted.items())
        ]
        path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        return path

    # -- file helpers -------------------------------------------------------

    @staticmethod
    def _write_json(path: Path, data: dict) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(
            json.dumps(data, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
        os.replace(tmp, path)

    @staticmethod
    def _read_json(path: Path) -> dict:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    @staticmethod
    def _append_jsonl(path: Path, row: dict) -> None:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")

    @staticmethod
    def _read_jsonl(path: Path) -> list[dict]:
        if not path.is_file():
            return []
        with open(path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]

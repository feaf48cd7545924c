"""citescout: agentic citation grounding and its benchmark harness."""

__version__ = "0.1.0"

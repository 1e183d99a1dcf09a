"""Scenario presets for `ralab profile`.

`final` reads fresh files with the fastest parsers and injects the measured
costs of its environment operations. `simple` reads the periodically
refreshed rate table through a spawned command per query.

Groups run several presets and compare them side by side: `pair` runs
`final` and `simple`, `environments` runs the same agent on each way of
reaching the link, and `agents` runs each agent on the `final` environment.
Values from the config file and the flags override the preset.
"""
from typing import Any

_FRESH_FILE_BACKEND = {
    "kind": "fresh_file",
    "state_parser": "pattern",
    "reward_parser": "split",
    "latency": {"set_action": 15.105, "get_reward": 0.246, "get_state": 0.299},
}

PRESETS: dict[str, dict[str, Any]] = {
    "final": {
        "scenario": "final",
        "backend": _FRESH_FILE_BACKEND,
    },
    "simple": {
        "scenario": "simple",
        "backend": {
            "kind": "stale_file",
            "external_access": True,
            "latency": {"set_action": 11.535},
        },
    },
    "external_command": {
        "scenario": "external_command",
        "backend": {
            "kind": "external_command",
            "latency": {"set_action": 11.535},
        },
    },
    "fresh_file": {
        "scenario": "fresh_file",
        "backend": _FRESH_FILE_BACKEND,
    },
    "in_memory": {
        "scenario": "in_memory",
        "backend": {
            "kind": "in_memory",
            "latency": {"set_action": 14.981, "get_reward": 0.085, "get_state": 1.012},
        },
    },
    **{kind: {"scenario": kind, "backend": _FRESH_FILE_BACKEND, "agent": {"kind": kind}}
       for kind in ("dqn", "dqn_frozen", "q_learning")},
}

PRESET_GROUPS: dict[str, tuple[str, ...]] = {
    **{name: (name,) for name in PRESETS},
    "pair": ("final", "simple"),
    "environments": ("external_command", "fresh_file", "in_memory"),
    "agents": ("dqn", "dqn_frozen", "q_learning"),
}


def deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged

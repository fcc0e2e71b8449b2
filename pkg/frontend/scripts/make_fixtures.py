"""Regenerates the console's golden fixtures from the server encoder.

Run from the repository root:

    python3 frontend/scripts/make_fixtures.py

Outputs (committed, only regenerated on a deliberate mapping change):
  - frontend/test/fixtures/wire_messages.ndjson  (copy of the server golden)
  - frontend/test/fixtures/clicks.json           (click inputs)
  - frontend/test/fixtures/click_commands.ndjson (expected canonical payloads)
"""
import json
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
FIXTURES = ROOT / "frontend" / "test" / "fixtures"

sys.path.insert(0, str(ROOT / "src"))
from followbot.protocol import TAB_ACTIONS  # noqa: E402

CLICKS = [
    ("base", 0.05, 0.5),
    ("base", 0.32, 0.2),
    ("base", 0.95, 0.5),
    ("base", 0.7, 0.4),
    ("base", 0.5, 0.1),
    ("base", 0.5, 0.25),
    ("base", 0.45, 0.9),
    ("arm_low", 0.5, 0.05),
    ("arm_low", 0.5, 0.95),
    ("arm_low", 0.05, 0.5),
    ("arm_low", 0.9, 0.45),
    ("arm_low", 0.6, 0.2),
    ("arm_high", 0.25, 0.8),
    ("arm_high", 0.85, 0.6),
    ("gripper", 0.1, 0.5),
    ("gripper", 0.9, 0.3),
    ("gripper", 0.5, 0.15),
    ("gripper", 0.45, 0.8),
    ("camera", 0.0, 0.5),
    ("camera", 0.31, 0.5),
    ("camera", 0.5, 0.5),
    ("camera", 0.98, 0.12),
]


def ratio(x, center, half):
    return min(1, abs(x - center) / half)


def click_to_command(tab, u, v):
    """Reference copy of the console's region mapping (see clickmap.ts)."""
    caps = TAB_ACTIONS[tab]
    if tab == "base":
        if u < 1 / 3:
            action, mag = "rotate", caps["rotate"] * ratio(u, 1 / 6, 1 / 6)
        elif u > 2 / 3:
            action, mag = "rotate", -caps["rotate"] * ratio(u, 5 / 6, 1 / 6)
        elif v < 0.5:
            action, mag = "translate", caps["translate"] * ratio(v, 0.25, 0.25)
        else:
            action, mag = "translate", -caps["translate"] * ratio(v, 0.75, 0.25)
    elif tab in ("arm_low", "arm_high"):
        if abs(v - 0.5) >= abs(u - 0.5):
            if v < 0.5:
                action, mag = "lift", caps["lift"] * ratio(v, 0.25, 0.25)
            else:
                action, mag = "lift", -caps["lift"] * ratio(v, 0.75, 0.25)
        elif u < 0.5:
            action, mag = "extend", -caps["extend"] * ratio(u, 0.25, 0.25)
        else:
            action, mag = "extend", caps["extend"] * ratio(u, 0.75, 0.25)
    elif tab == "gripper":
        if u < 1 / 3:
            action, mag = "open", 1.0
        elif u > 2 / 3:
            action, mag = "close", 1.0
        elif v < 0.5:
            action, mag = "wrist", caps["wrist"] * ratio(v, 0.25, 0.25)
        else:
            action, mag = "wrist", -caps["wrist"] * ratio(v, 0.75, 0.25)
    elif tab == "camera":
        if u < 0.5:
            action, mag = "pan", -caps["pan"] * ratio(u, 0.5, 0.5)
        else:
            action, mag = "pan", caps["pan"] * ratio(u, 0.5, 0.5)
    else:
        raise ValueError(tab)
    return {"action": action, "click": [u, v], "magnitude": float(mag),
            "tab": tab}


def state_fixture():
    """One deterministic state broadcast from the bundled serve scene."""
    from followbot.runner import Simulation
    from followbot.scenario import bundled_scenario_path, load_scenario

    sim = Simulation(load_scenario(bundled_scenario_path("serve_default")))
    for _ in range(40):
        sim.step_once()
    return sim.state_update_payload()


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "state_update.json").write_text(
        json.dumps(state_fixture(), sort_keys=True, indent=2) + "\n")
    shutil.copy(ROOT / "tests" / "golden" / "wire_messages.ndjson",
                FIXTURES / "wire_messages.ndjson")
    (FIXTURES / "clicks.json").write_text(json.dumps(
        [{"tab": t, "u": u, "v": v} for t, u, v in CLICKS], indent=2) + "\n")
    lines = [json.dumps(click_to_command(t, u, v), sort_keys=True,
                        separators=(",", ":")) for t, u, v in CLICKS]
    (FIXTURES / "click_commands.ndjson").write_text("\n".join(lines) + "\n")
    print(f"wrote {len(CLICKS)} click fixtures to {FIXTURES}")


if __name__ == "__main__":
    main()

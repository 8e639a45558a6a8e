#!/usr/bin/env python3
"""Regenerates the dashboard audit fixture.

Runs a three-minute live simulated session (including a 165 km/h burst
that latches the verdict invalid) against the service and records every
WebSocket message verbatim, one per line, into
frontend/test/fixtures/live_session.ndjson.
"""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from rdemon.service import create_app

PROFILE = {
    "phases": [
        {"duration_s": 60.0, "target_speed_kmph": 50.0, "aggressiveness": 0.5},
        {"duration_s": 40.0, "target_speed_kmph": 120.0, "aggressiveness": 0.6},
        {"duration_s": 25.0, "target_speed_kmph": 165.0, "aggressiveness": 0.9},
        {"duration_s": 55.0, "target_speed_kmph": 80.0, "aggressiveness": 0.5},
    ]
}


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "frontend/test/fixtures/live_session.ndjson"
    out.parent.mkdir(parents=True, exist_ok=True)
    lines: list[str] = []
    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(trip_dir=tmp)
        with TestClient(app) as client:
            # paced at 30 simulated seconds per wall second: fast, but slow
            # enough for this recorder to subscribe before the drive ends
            resp = client.post(
                "/sessions", json={"mode": "live", "profile_doc": PROFILE, "rate": 30}
            )
            resp.raise_for_status()
            sid = resp.json()["id"]
            with client.websocket_connect(f"/sessions/{sid}/live") as ws:
                while True:
                    try:
                        lines.append(ws.receive_text())
                    except Exception:
                        break
            client.delete(f"/sessions/{sid}")
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(lines)} messages)")


if __name__ == "__main__":
    sys.exit(main())

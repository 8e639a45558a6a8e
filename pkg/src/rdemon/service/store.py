"""Content-addressed trip store: a directory of canonical CDP files with
report sidecars.  The id is a hash of the canonical bytes, so uploading
the same trip twice is idempotent."""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

from ..obd import CdpTrip, read_cdp, write_cdp
from ..rde import RdeParameters
from ..reporting import report_document, segment_table


class UnknownTripError(KeyError):
    def __init__(self, trip_id: str):
        super().__init__(trip_id)
        self.trip_id = trip_id


class TripStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    # -- paths -----------------------------------------------------------

    def _trip_path(self, trip_id: str) -> Path:
        return self.root / f"{trip_id}.cdp.json"

    def _report_path(self, trip_id: str) -> Path:
        return self.root / f"{trip_id}.report.json"

    # -- operations ---------------------------------------------------------

    def put(self, data: bytes | CdpTrip) -> str:
        """Validate, canonicalize, and store; returns the content id."""
        trip = data if isinstance(data, CdpTrip) else read_cdp(data)
        canonical = write_cdp(trip)
        trip_id = hashlib.sha256(canonical).hexdigest()[:16]
        with self._lock:
            path = self._trip_path(trip_id)
            if not path.exists():
                path.write_bytes(canonical)
        return trip_id

    def get_bytes(self, trip_id: str) -> bytes:
        path = self._trip_path(trip_id)
        if not path.exists():
            raise UnknownTripError(trip_id)
        return path.read_bytes()

    def get(self, trip_id: str) -> CdpTrip:
        return read_cdp(self.get_bytes(trip_id))

    def ids(self) -> list[str]:
        return sorted(p.name[: -len(".cdp.json")] for p in self.root.glob("*.cdp.json"))

    def report(self, trip_id: str, params: RdeParameters | None = None) -> dict:
        """Segment table for a stored trip, cached in a sidecar file."""
        sidecar = self._report_path(trip_id)
        if sidecar.exists():
            return json.loads(sidecar.read_text())
        doc = report_document(segment_table(self.get(trip_id), params))
        with self._lock:
            if not sidecar.exists():
                sidecar.write_text(json.dumps(doc, indent=2, ensure_ascii=False))
        return doc

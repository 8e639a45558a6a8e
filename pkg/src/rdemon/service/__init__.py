"""Monitor service: sessions, trip store, HTTP/WebSocket API."""

from .app import create_app
from .models import (
    ControlRequest,
    FinalReport,
    SessionInfo,
    StartSessionRequest,
    TriggerRecord,
    UiState,
    build_ui_state,
)
from .sessions import (
    NoSessionError,
    NotLiveError,
    Session,
    SessionBusyError,
    SessionManager,
)
from .store import TripStore, UnknownTripError

__all__ = [
    "ControlRequest",
    "FinalReport",
    "NoSessionError",
    "NotLiveError",
    "Session",
    "SessionBusyError",
    "SessionInfo",
    "SessionManager",
    "StartSessionRequest",
    "TriggerRecord",
    "TripStore",
    "UiState",
    "UnknownTripError",
    "build_ui_state",
    "create_app",
]

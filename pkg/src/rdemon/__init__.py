"""rdemon: stream-based runtime monitoring for Real Driving Emissions drives."""

__version__ = "0.1.0"

"""Haptic knob workbench: torque engine, simulator, wire protocol, MIDI
sequencing, pitch-bend session tooling, study statistics, and the HTTP/WS
bridge that ties them together."""

__version__ = "0.1.0"

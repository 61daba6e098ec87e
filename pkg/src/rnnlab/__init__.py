"""Stepwise-observable RNN/LSTM training engine with a live steering service."""

__version__ = "0.1.0"

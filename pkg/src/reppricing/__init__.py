"""Reputation-dependent pricing game."""

"""Test suite for the pmech engine."""

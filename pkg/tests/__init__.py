"""Tests for the milling-ga package."""

"""Test suite for gaitstage."""

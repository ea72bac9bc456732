"""Unit tests for gaitstage modules."""

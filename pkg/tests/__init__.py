"""Test suite for HEDit."""

"""Shipped data files (transliteration tables)."""

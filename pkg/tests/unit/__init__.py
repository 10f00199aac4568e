"""Unit tests for the comixture toolkit."""

"""Integration tests for the comixture toolkit."""

"""Comixture Toolkit Test Suite."""

"""Integration tests for FileArchitect."""

"""
Test suite for FileArchitect.

This package contains unit tests, integration tests, and test fixtures.
"""

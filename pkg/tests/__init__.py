"""Tests for app package."""


"""Tests for Glean."""




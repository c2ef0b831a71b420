"""Test suite for fracladder."""

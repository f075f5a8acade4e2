"""
Tests for the competition-complexity lab.
"""

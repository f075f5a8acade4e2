"""
Test suite for Agent Foundry
"""

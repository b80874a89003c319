"""
Tests for the rebsim package
"""

"""
Test package for the SLAR library and benchmark CLI
"""

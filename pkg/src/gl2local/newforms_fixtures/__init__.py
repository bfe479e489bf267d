"""Recorded newform coefficient responses for offline use.

Each JSON file holds one response in the shape served by an LMFDB-compatible
endpoint; tools/make_fixtures.py regenerates and re-validates them.
"""

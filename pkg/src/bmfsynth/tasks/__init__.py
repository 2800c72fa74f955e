"""
Task entry-points for the bmfsynth CLI.
"""

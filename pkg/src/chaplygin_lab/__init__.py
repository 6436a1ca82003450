"""Singularity formation and delta-shock continuation for 1-D Chaplygin gas."""

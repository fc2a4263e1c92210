"""Sampling-based optimal motion planners (RRT*, B-RRT*, IB-RRT*, BiRRT) and a benchmark harness."""

__version__ = "0.1.0"

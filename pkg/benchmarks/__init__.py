"""Training-scale acceptance runs; see acceptance_bench.py."""

"""
Unit Tests for the Overlap Laboratory

This package contains unit tests for:
- Linear algebra kernels
- Scalar and vector laws, ensembles and conditional samplers
- Overlap matrices, the pair recurrence and quenched formulas
- Statistics and the replica harness
- Configuration, reports and the command line
"""

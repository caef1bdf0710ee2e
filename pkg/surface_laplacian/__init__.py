"""Laplacian matrices, polynomials and modules of signed graphs in closed oriented surfaces."""

import sys

from surface_laplacian.main import run

sys.exit(run())

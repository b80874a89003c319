"""
Remote entanglement building-block simulator
"""
import os

# Dense kernels here are small; single-threaded BLAS keeps sweep output
# bit-identical for any worker count.
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

__version__ = "1.0.0"

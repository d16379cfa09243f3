"""DFT computation for signals whose frequency support is known in advance."""

from .core import (
    OpCount,
    SupportSet,
    aliased_spectra,
    aliased_spectrum,
    downsample,
    fft_pow2,
    ifft_pow2,
    paper_cost_model,
    random_spectrum,
    shift,
    synthesize_signal,
)
from .errors import AlgorithmFailure, InvalidInputError, SingularMatrixError, UnderdeterminedError
from .tree import CongruenceTree, build_tree
from .linalg import cond2, determinant, lu_solve
from .baselines import resolve_level, shift_and_sample, submatrix_method
from .progressive import ProgressiveConfig, extract_merging_trees, progressive_sdft
from .report import RunReport

__version__ = "0.1.0"

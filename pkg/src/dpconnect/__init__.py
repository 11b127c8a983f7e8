"""Edge-adjacent differentially private connectedness statistics for labeled networks."""

from .binary import BinaryDpRelease, ReleaseAborted, debias_node_stats, hajek, release_binary
from .continuous import DpRegression, dp_suff_stats, eiv_debias, privatize_ranks, release_mafr
from .graph import EGO_TO_ALL, WITHIN_CELL, GraphError, LabeledGraph, build_graph, degree
from .indices import afr, cross_connectedness, mafr, ols, rho, same_connectedness
from .noise import PrivacyBudget, flip_probability, make_rng, trunc_laplace_params

__version__ = "0.1.0"

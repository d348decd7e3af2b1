"""Persistent homology of weighted ordinal partition networks."""

__version__ = "0.1.0"

from .analysis import Embedding, SvmModel, mds_embed, separation_accuracy, svm_train
from .diagmetric import bottleneck, normalized_bottleneck, pairwise_bottleneck
from .dynsys import NoiseSpec, Signal, SystemSpec, add_noise, integrate, lookup, registry, simulate, trim
from .graphdist import METHODS, DistanceMatrix, distance_matrix, normalize
from .opn import PermutationSequence, WeightedNetwork, build_network, embed, ordinal_network
from .persistence import PersistenceDiagram, rips_persistence

"""Predict missing node attributes from attribute proclivity and h-hop neighbourhoods."""

__version__ = "0.1.0"

from .featurize import FeatureConfig, FeatureMatrix, Mode, featurize_all
from .graph import AttributedGraph, Attribute, Kind, SchemaOptions, discretize, load_graph, write_graph
from .proclivity import GenerativeFunction, MixingMatrix, ProclivityMatrix, divergence, mixing_matrix, prone, prone_matrix

__all__ = [
    "Attribute", "AttributedGraph", "FeatureConfig", "FeatureMatrix", "GenerativeFunction", "Kind",
    "MixingMatrix", "Mode", "ProclivityMatrix", "SchemaOptions", "discretize", "divergence",
    "featurize_all", "load_graph", "mixing_matrix", "prone", "prone_matrix", "write_graph",
]

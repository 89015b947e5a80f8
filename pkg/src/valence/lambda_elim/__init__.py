"""Graph classification, decomposition and λ-elimination."""

from .classify import (ClassificationError, ClassificationResult, DecompositionPlan, ElementClass, FreeB,
                       TimesZ, classify, decompose, element_class, evaluate, plan_is_identity)
from .eliminate import (eliminate_lambda, eliminate_lambda_B, eliminate_lambda_free_B,
                        eliminate_lambda_times_Z, eliminate_to_transducer)
from .ratnormal import rat_normal_B
from .transducer import SLEdge, SLTransducer, VEdge, VTransducer

__all__ = [
    "ClassificationError", "ClassificationResult", "DecompositionPlan", "ElementClass", "FreeB", "TimesZ",
    "classify", "decompose", "element_class", "evaluate", "plan_is_identity",
    "eliminate_lambda", "eliminate_lambda_B", "eliminate_lambda_free_B", "eliminate_lambda_times_Z",
    "eliminate_to_transducer", "rat_normal_B", "SLEdge", "SLTransducer", "VEdge", "VTransducer",
]

"""
Core modules for exact generalized Ricci curvature computations
"""

from .errors import (GRicciError, InputError, ParseError, DegreeOverflow, UnknownInstance,
                     SingularGram, NonMetricConnection, MissingMetric, HypothesisViolated,
                     RankOneSide, ConstructionFailed, NonTensorialDefect, NotHomogeneous,
                     SymmetryLost, StepRejected)
from .settings import Settings, get_settings, load_settings
from .reports import Verdict, CheckReport, ReportLine, RicciReport
from .polyalg import Poly, PolyVecField, poly_parse, poly_print, parse_rational
from .courant import CourantAlgebroid, Section, Covector, bracket, pairing, axiom_check
from .metric import GenMetric, AdaptedFrame, adapted_frame, metric_validate, project
from .connection import (GenConnection, DivergenceOp, is_metric, is_pure_type,
                         divergence_of_connection, naive_curvature)
from .curvature import (RICCI_KINDS, RicciTensor, ricci, ricci_SV, R_GF, R_JV, verify_theorem1,
                        verify_theorem2, verify_independence, verify_section4, so_valued_check)
from .construct import (InstanceSpec, CATALOG_NAMES, catalog, canonical_connection,
                        divergence_correction, random_kernel_B, tilted_metric)
from .flow import FlowState, ricci_endomorphism, initial_state, flow_step, flow_run, write_trajectory
from .instance_file import InstanceFile, load_instance, export_instance

__all__ = [
    'GRicciError', 'InputError', 'ParseError', 'DegreeOverflow', 'UnknownInstance',
    'SingularGram', 'NonMetricConnection', 'MissingMetric', 'HypothesisViolated',
    'RankOneSide', 'ConstructionFailed', 'NonTensorialDefect', 'NotHomogeneous',
    'SymmetryLost', 'StepRejected',
    'Settings', 'get_settings', 'load_settings',
    'Verdict', 'CheckReport', 'ReportLine', 'RicciReport',
    'Poly', 'PolyVecField', 'poly_parse', 'poly_print', 'parse_rational',
    'CourantAlgebroid', 'Section', 'Covector', 'bracket', 'pairing', 'axiom_check',
    'GenMetric', 'AdaptedFrame', 'adapted_frame', 'metric_validate', 'project',
    'GenConnection', 'DivergenceOp', 'is_metric', 'is_pure_type',
    'divergence_of_connection', 'naive_curvature',
    'RICCI_KINDS', 'RicciTensor', 'ricci', 'ricci_SV', 'R_GF', 'R_JV', 'verify_theorem1',
    'verify_theorem2', 'verify_independence', 'verify_section4', 'so_valued_check',
    'InstanceSpec', 'CATALOG_NAMES', 'catalog', 'canonical_connection',
    'divergence_correction', 'random_kernel_B', 'tilted_metric',
    'FlowState', 'ricci_endomorphism', 'initial_state', 'flow_step', 'flow_run',
    'write_trajectory',
    'InstanceFile', 'load_instance', 'export_instance',
]

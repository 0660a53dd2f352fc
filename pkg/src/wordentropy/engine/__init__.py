from .bracket import BracketOptions, EntropyBracket, MinReport, ew_bracket, min_experiment, pf_bracket
from .certificate import Certificate, CertificateFailure, certify_lower, verify
from .slice import FollowerGraph, Slice, UpperBound, build_pruned_graph, enumerate_slice, upper_bound
from .spectral import ReducibleMatrix, SpectralEnclosure, spectral_radius

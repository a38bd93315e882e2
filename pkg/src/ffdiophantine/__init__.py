"""Exact Diophantine approximation experiments over Laurent series fields F_q((1/T))."""
from .algebra import FieldElement, FieldSpec, Poly, gf, parse_poly, format_poly, poly_gcd, poly_xgcd
from .laurent import EXACT, LaurentSeries, format_series, from_rational, parse_series
from .contfrac import (CFExpansion, Convergent, QuadraticNumber, cf_distance, cf_expand, cf_value,
                       conjugate_distance, convergents, format_cf, parse_cf, quadratic_from_runs,
                       quadratic_value, verify_identities)
from .classia import (ClassIAPattern, DegreeCertificate, degree_certificate, empirical_extrema,
                      generate_quotients, newton_irreducible, ratio_bounds)
from .constructions import (ApproximantFamily, ApproximationRecord, SeqParams, build_conti1,
                            build_conti2, build_gap_series, build_mainalg, build_realequal,
                            seq_search)
from .exponents import (ExponentEstimate, VerdictReport, brute_force_wn, check_bestquad,
                        check_bestrational, height, liouville_check, w1_estimate)
from .automata import (Automaton, Relation, christol_relation_search, parse_automaton,
                       series_from_automaton)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "FieldElement",
    "FieldSpec",
    "Poly",
    "gf",
    "parse_poly",
    "format_poly",
    "poly_gcd",
    "poly_xgcd",
    "EXACT",
    "LaurentSeries",
    "format_series",
    "from_rational",
    "parse_series",
    "CFExpansion",
    "Convergent",
    "QuadraticNumber",
    "cf_distance",
    "cf_expand",
    "cf_value",
    "conjugate_distance",
    "convergents",
    "format_cf",
    "parse_cf",
    "quadratic_from_runs",
    "quadratic_value",
    "verify_identities",
    "ClassIAPattern",
    "DegreeCertificate",
    "degree_certificate",
    "empirical_extrema",
    "generate_quotients",
    "newton_irreducible",
    "ratio_bounds",
    "ApproximantFamily",
    "ApproximationRecord",
    "SeqParams",
    "build_conti1",
    "build_conti2",
    "build_gap_series",
    "build_mainalg",
    "build_realequal",
    "seq_search",
    "ExponentEstimate",
    "VerdictReport",
    "brute_force_wn",
    "check_bestquad",
    "check_bestrational",
    "height",
    "liouville_check",
    "w1_estimate",
    "Automaton",
    "Relation",
    "christol_relation_search",
    "parse_automaton",
    "series_from_automaton",
    "errors",
]

"""Exact certification of N-PR (pseudo-Rademacher) sets of characters.

Groups are finitely generated abelian groups Z^r + Z/m_1 + ... + Z/m_t; a
finite set E of elements is N-PR when every Z_N-valued function on E is a
point evaluation of the dual group.
"""

from .certify import (IndependenceCertificate, Infeasible, InterpolationProblem, KroneckerEstimate,
                      NprCertificate, Witness, brute_force_check, interpolate, is_independent, is_npr,
                      npr_modulus, translate_set, weak_kronecker_eps)
from .errors import (BoundExceeded, CertificationError, CollisionError, GroupSpecError,
                     InsufficientDivisibility, NontrivialIntersection, NprError, PreconditionError,
                     SpecMismatchError)
from .extract import (ExtractionReport, cardinality_diagnostic, compose_npr, extract_any, extract_ppr,
                      largest_npr_subset, max_independent_subset, staircase_extract)
from .groups import (INFINITE, DualPoint, Element, ElementSet, GroupSpec, canonicalize, combine,
                     eval_pair, order, parse_group_spec, primary_decompose)
from .lattice import IntMatrix, RelationLattice, hnf, integer_kernel, relation_lattice, snf
from .structure import (QuotientMap, decompose_prop35, dimension_bound, map_set, power_map,
                        proj_coordinate, quotient_by_torsion, quotient_pn, root_map)

__version__ = "0.1.0"

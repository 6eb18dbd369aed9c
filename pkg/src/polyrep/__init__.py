"""polyrep: polynomial inequality representations of low-dimensional polyhedra."""

from .poly import Polynomial, TermBudgetError, DimensionMismatch
from .forms import Form, PolyForm, form_from_payload, as_form
from .geometry import (
    Halfspace, Polytope, ConeRep, HyperplanePolytope, LinealityDecomposition,
    from_halfspaces, facet_form, support, exposed_face, face_normal,
    supporting_cone, vertex_figure, in_outer_cone, visible_facets,
    region_membership, decompose, homogenization_cone, cross_section,
    GeometryError, DegenerateInputError, UnboundedInputError,
    HeuristicFailureError,
)

__version__ = "0.1.0"

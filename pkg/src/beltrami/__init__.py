"""Exact exterior calculus and periodic-orbit search on the flat 3-torus.

The package verifies, with rational arithmetic where possible, the circle
of identities tying curl eigenfields of a Riemannian metric to contact
forms and their Reeb flows, and gathers desk-scale numerical evidence for
their closed orbits: ABC-family and helical model fields, steady-fluid
checks with pressure recovery, homotopy-triviality certificates, section
point clouds and Newton-refined periodic orbits with winding data.
"""

__version__ = "0.1.0"

from .contact import (AdaptedFrame, AdaptedMetricResult, BeltramiReport,
                      BeltramiStatus, ContactReport, ContactVerdict,
                      CurlFreeReport, EulerReport, EulerVerdict, ReebReport,
                      adapted_metric, beltrami_factor, contact_from_beltrami,
                      curl_free_case, is_contact, is_euler_steady, reeb_field,
                      verify_reeb)
from .dsl import (FieldSpec, FieldSyntaxError, ParseDiagnostic, parse_document,
                  parse_field_spec, parse_scalar, serialize, serialize_scalar)
from .exprfield import ExprField, Witness, WitnessError
from .forms import (DegreeError, KForm, Metric, MetricError,
                    SingularFieldError, VectorField, VolumeForm, cross, curl,
                    euclidean_metric, ext_d, flat, hodge, interior,
                    is_volume_preserving, lie_derivative, sharp,
                    standard_volume, wedge)
from .models import (ABCParams, EnergyResult, HomotopyCertificate, abc_field,
                     abc_nonsingular, energy, gauss_certificate, giroux_form,
                     giroux_reeb)
from .orbits import (Crossing, IntegratorStats, Orbit, OrbitSearchResult,
                     SectionData, SeedRecord, StepSizeUnderflow, Trajectory,
                     contractible, find_orbits, integrate, lattice_seeds,
                     orbit_sweep, plane_crossings, poincare)
from .trig import TrigPoly

__all__ = [name for name in dir() if not name.startswith("_")]

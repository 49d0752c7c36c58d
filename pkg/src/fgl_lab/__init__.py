"""Exact formal group law computations: p-series, quotient rings and the Ando criterion."""

__version__ = "0.1.0"

from .rings import QQ, ZZ, Ring, RingError, NotAUnitError, ZpLocal, Zmod, is_prime, valuation
from .series import (Precision, SeriesError, TruncatedSeries, compose, divide, invert_unit,
                     multiply_exact, reverse, variables)
from .weierstrass import (Preparation, WeierstrassError, check_distinguished, weierstrass_degree,
                          weierstrass_divide, weierstrass_prepare)
from .fgl import (AxiomReport, FGLError, FormalGroupLaw, NSeries, NonIntegralError, builtin,
                  check_axioms, custom, divided_p_series, fgl_from_log, formal_inverse, formal_sum,
                  honda, honda_log, make_builtin, n_series, p_series, weierstrass_height)
from .quotient import (InjectivityVerdict, InsufficientPrecisionError, IntersectionCertificate,
                       InvariantSubring, PreparedQuotientRing, TransferIdeal, UnsupportedHeightError,
                       build_bcp_ring, build_transfer_quotient, fpx_invariants,
                       ideal_intersection_witness, injectivity_check, injectivity_property,
                       transfer_ideal)
from .power import (AndoVerdict, PowerOperationError, TotalPowerOperation, ando_check,
                    apply_power_operation, candidate, check_multiplicativity_mod_transfer,
                    fpx_invariance_check, lubin_product, make_power_operation)
from .tower import (EnLocal, KnLocal, LocalizationSpec, PLocal, Rational, StageReport,
                    obstruction_stages, parse_localization, stage_status, tower_report)

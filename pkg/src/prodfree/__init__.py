"""Product-free sets of residues built from Omega-windows of divisors."""

from .approx import ApproxValue
from .arith import (FactorShape, OmegaWindow, big_omega, divisors_with_omega, entropy_q,
                    euler_phi_ratio, lcm_shape, pow_shape, radical, resolve_window)
from .construct import (DivisorClassSet, ExampleReport, ResidueSet, delta_lower_bound,
                        density_of_window_set, divisor_window_set, lift_to_residues, qnr_set,
                        worked_example, theorem_general_instance, theorem_main_instance)
from .primes import PrimeTable, first_n_primes, load_table, save_table, sieve_upto
from .series import (SymSums, capped_sums, complete_homogeneous, elementary_symmetric,
                     euler_product, phi_ratio_log, power_sums, restricted_reciprocal_sum)
from .verify import (Counterexample, MaxFreeResult, is_kj_product_free,
                     is_product_free_integers, is_product_free_residues, max_product_free,
                     upper_density_bound_check)

__version__ = "0.1.0"

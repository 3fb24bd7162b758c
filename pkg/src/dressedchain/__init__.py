"""Bloch oscillations of a two-level atom chain dressed by single-mode quantum light."""
from .model import (EXCITED, GROUND, ORPHAN, ChainConfig, Layout, NumericError, StateVector,
                    TruncationError, ValidationError, default_n_max, norm, sector_norms)
from .states import (GaussianSpec, coherent_product_state, dressed_eigenstate,
                     entangled_fock_state, fock_product_state, gaussian_amplitudes,
                     vacuum_product_state)
from .dynamics import (CrankNicolson, EvolutionPlan, assemble_sector, cn_step, default_dt,
                       evolve, solve_sector_system)
from .observables import (ObservableFrame, inversion_density, mean_photon_number, observe,
                          packet_center, photon_distribution, photon_entropy, photon_variance,
                          tunneling_current_density)
from .pulse import Envelope, coupling_at, pulse_area

__version__ = "0.1.0"

"""Simulation and analysis of noisy periodic and concatenated dynamical decoupling."""
from .linalg import BranchAmbiguity, DomainError, SystemSplit
from .model import (ControlErrorSpec, PulseWidthSpec, SystemBathHamiltonian, assemble,
                    sample_random, unitary_control_error)
from .sequences import DDSchedule, NoisyGateSet, cdd_schedule, propagate_ideal, propagate_noisy
from .metrics import ChannelSample, EffectiveGenerator, effective_generator, infidelity
from .reporting import SweepReport

__version__ = '0.1.0'

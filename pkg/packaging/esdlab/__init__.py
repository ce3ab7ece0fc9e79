#
# This file is part of esdlab (entanglement sudden death lab)
# Copyright (C) 2026 esdlab contributors
#
# This library is free software; you can redistribute it and/or
# modify it under the terms of the GNU Lesser General Public
# License as published by the Free Software Foundation; either
# version 2.1 of the License, or (at your option) any later version.
#
# This library is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public
# License along with this library; if not, write to the Free Software
# Foundation, Inc., 51 Franklin St, Fifth Floor, Boston, MA  02110-1301  USA
#

"""esdlab Python module.

A desk-scale laboratory for manipulating entanglement sudden death (ESD)
of two polarization qubits with amplitude-damping channels and local NOT
operations.

Several things happen when you do:

    >>> import esdlab

 1) Defaults declared in 'esdlab_settings.py' are pushed into the process
    environment, unless the environment already defines them.

 2) The 'esdlab' parent logger is created and set to the severity named by
    ESDLAB_LOG_LEVEL. Library modules log to children of it and never
    configure handlers themselves.

 3) The numerical layers (qmat, states, channels, analysis, protocol, optics,
    syserrors, tomography) are imported and their main entry points are
    re-exported here.

"""

import enum
import logging
import os

__version__ = "1.0.0"


def bootstrap_env():
    """
    Push the defaults declared in esdlab_settings.py into os.environ.

    The settings module holds an `env` dict; keys already present in the
    process environment win, so ESDLAB_LOG_LEVEL=DEBUG on the command
    line overrides the shipped default.
    """
    if os.path.exists(os.path.join(
            os.path.dirname(__file__), 'esdlab_settings.py')):
        from .esdlab_settings import env
        process_keys = os.environ.keys()
        for key, value in env.items():
            if key not in process_keys:
                os.environ[key] = value

bootstrap_env()


class severity_type(enum.IntEnum):
    """Logger severities, ordered from most to least verbose."""
    Debug = 0
    Info = 1
    Warn = 2
    Error = 3
    None_ = 4

_LEVELS = {
    severity_type.Debug: logging.DEBUG,
    severity_type.Info: logging.INFO,
    severity_type.Warn: logging.WARNING,
    severity_type.Error: logging.ERROR,
    severity_type.None_: logging.CRITICAL + 10,
}


class logger(object):
    """Severity control for every 'esdlab.*' logger."""

    @staticmethod
    def get_severity():
        level = logging.getLogger("esdlab").getEffectiveLevel()
        for severity, mapped in sorted(_LEVELS.items(), key=lambda kv: kv[1]):
            if level <= mapped:
                return severity
        return severity_type.None_

    @staticmethod
    def set_severity(severity):
        logging.getLogger("esdlab").setLevel(_LEVELS[severity_type(severity)])


logging.getLogger("esdlab").setLevel(os.environ.get("ESDLAB_LOG_LEVEL", "WARNING").upper())

from .exceptions import *
from .qmat import DensityMatrix, dagger, herm_eig, kron, psd_sqrt
from .states import StateParams, make_state, purity, renormalize
from .channels import (KrausChannel, TemporalMismatch, apply_channel, compose, correlated_adc_kraus, not_unitary,
                       product_channel, standard_adc_kraus)
from .analysis import (EsdThreshold, Regime, Trajectory, classify, concurrence, find_esd_threshold, regime_map,
                       xstate_concurrence)
from .protocol import (ProtocolConfig, characterize_first_channel, characterize_second_channel, run_pipeline,
                       separable_purity_test)
from .optics import OpticalTrain, angle_to_damping, build_train_unitary, derive_kraus, displaced_sagnac
from .syserrors import (ConcurrencePerturbation, ErrorBudget, damping_error, first_order_delta_c,
                        monte_carlo_delta_c, perturb_kraus, state_prep_error)
from .tomography import CountRecord, MeasurementSetting, reconstruct, repeated_qst, simulate_counts

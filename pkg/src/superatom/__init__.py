"""Chirped two-photon Rydberg excitation simulator for blockaded ensembles.

Core layout:

* :mod:`superatom.units`        -- frequency/time unit conventions
* :mod:`superatom.hamiltonians` -- models and Hamiltonian builders
* :mod:`superatom.pulses`       -- pulse shapes, chirp, adiabaticity
* :mod:`superatom.dynamics`     -- Schrodinger/Lindblad integration, Monte Carlo
* :mod:`superatom.photons`      -- retrieval, detection and HBT statistics
* :mod:`superatom.fitting`      -- scan-curve fits and peak metrics
* :mod:`superatom.scenarios`    -- pre-registered scans and the sweep engine
* :mod:`superatom.service`      -- FastAPI wrapper around the scenarios
* :mod:`superatom.cli`          -- thin command-line client
"""

__version__ = "0.1.0"

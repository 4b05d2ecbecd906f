"""Characteristic analysis of nonlinear field models.

Subpackages group by capability:

* ``jets`` - third-order forward-mode Taylor jets (the derivative engine).
* ``lagrangians`` - built-in model catalog and the expression parser.
* ``ce`` - exceptionality residuals and grid classification.
* ``charsys`` - first-order characteristic systems, wave cones, quartic roots.
* ``rays`` - Hamiltonian ray tracing and discontinuity-amplitude transport.
* ``shock1d`` - method of characteristics, simple waves, upwind solver.
* ``gravity`` - null-cone kernel analysis for metric discontinuities.
* ``cli`` - command line front end.
"""

__version__ = "0.1.0"

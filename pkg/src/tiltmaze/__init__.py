"""Ball-in-tilting-maze workbench.

A desk-scale circular maze (five concentric rings joined by gate
openings) sits on a two-axis tip-tilt platform. This package simulates
the ball's dynamics under platform commands, learns forward models of
those dynamics from logged trajectories, evaluates the learned models,
and closes the loop with trajectory-optimization control up to full
maze navigation.

Subpackages
-----------
core
    Geometry, state containers, angle utilities, artifact I/O.
sim
    Ground-truth simulator: ball dynamics with friction, gate
    transitions, actuator lag and delay, sensor noise.
physics
    Analytical acceleration features shared by simulator and models.
gp
    Exact Gaussian-process regression and the model zoo (P, PI, NP,
    SP, NPd).
sysid
    Trajectory filtering, dataset building, ARX platform fits.
rollout
    Multi-step prediction, error metrics, learning curves.
control
    Cost functions, iLQG planning, PD baseline, gate transitions,
    maze navigation.
config / cli
    Experiment schema and the ``tiltmaze`` command-line workflow.
"""

__version__ = "0.1.0"

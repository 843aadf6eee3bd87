"""Synthetic-scene human action recognition.

A factored two-chain temporal model with an HMM baseline, ROI motion
features, and majority-vote MAP fusion, over a reproducible blob-actor
scene generator. The heavy lifting lives in the `_core` extension.
"""

from actrec._core import *  # noqa: F401,F403
from actrec._core import __version__  # noqa: F401

"""Free, Boolean and circle-valued Levy processes: transforms, powers and limit checks."""

from . import (acceptance, boolean_small_time, circle_wrap, dt_randmat, ecalc, errors,
               free_small_time, laws, measures, mellin_moments, specfun)
from .errors import (BoundaryError, ClassError, ContinuationError, ConvergenceError, DivergenceError,
                     DomainError, FreeLevyError, HypothesisError, InversionError,
                     NotInfinitelyDivisibleError, NumericError, PoleError, TruncationError)
from .laws import (AdmissiblePair, BooleanStable, Cauchy, ClassicalStable, CuspLaw, DykemaHaagerup,
                   FreeBessel, FreeStable, LambdaFreeStable, MarchenkoPastur, MuAlphaBeta, NuAlpha,
                   PointMass, Semicircle, TwoPoint)
from .measures import AtomicMeasure, GridDensity, Mixed

__version__ = "0.1.0"

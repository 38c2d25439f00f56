'''
Model parameters, the fitted rate curve, drifts and the jump density
'''

from .params import ModelParams, OptionSpec, Exercise, Payoff, ModelMode
from .rate_curve import RateCurve, fit_phi, rate_curve
from .dynamics import rho3, mu_v, mu_x, drift_y, drift_reduced, levy_density, payoff

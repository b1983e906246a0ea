"""Proximal operators, a metric on subdifferentials, contraction perturbations
and proximal point dynamics, with randomized checks of the underlying facts."""

__version__ = "0.1.0"

from .catalog import (AbsSum, ConvexFunction, EuclNorm, Huber, IndicatorBall, IndicatorBox,  # noqa: E402
                      MinimizerInfo, Perturbed, Quadratic, Scaled, Shifted, Tikhonov, Zero,
                      from_dict, normalize, standard_catalog)
from .prox import Operator, ProxNonconvergence, ProxResult, moreau, prox, prox_operator  # noqa: E402
from .metric import MetricEstimate, ProbeSpec, gauge, metric, operator_distance  # noqa: E402
from .contraction import ContractionPlan, choose_sigma, m_bound, perturb  # noqa: E402
from .dynamics import iterate, stability_probe, super_regularity_probe  # noqa: E402
from .checks import (check_cycle_inequality, check_firmly_nonexpansive,  # noqa: E402
                     check_resolvent_identity, graphical_convergence_probe)

__all__ = [
    "AbsSum", "ConvexFunction", "EuclNorm", "Huber", "IndicatorBall", "IndicatorBox", "MinimizerInfo",
    "Perturbed", "Quadratic", "Scaled", "Shifted", "Tikhonov", "Zero", "from_dict", "normalize",
    "standard_catalog", "Operator", "ProxNonconvergence", "ProxResult", "moreau", "prox",
    "prox_operator", "MetricEstimate", "ProbeSpec", "gauge", "metric", "operator_distance",
    "ContractionPlan", "choose_sigma", "m_bound", "perturb", "iterate", "stability_probe",
    "super_regularity_probe", "check_cycle_inequality", "check_firmly_nonexpansive",
    "check_resolvent_identity", "graphical_convergence_probe",
]

"""Parameter sets of the simulation study (Examples 1-12).

All examples use intercepts (1e-6, 1e-6) and bivariate t(10) innovations.
"""

from .model import BivariateGarchParams, InnovationSpec

_A0 = (1e-6, 1e-6)

# example number -> (alpha, beta, rho)
_TABLE = {
    1: ([[.1, 0], [0, .1]], [[.8, 0], [0, .8]], 0.0),
    2: ([[.1, .05], [.05, .1]], [[.8, 0], [0, .8]], 0.0),
    3: ([[.1, 0], [0, .1]], [[.8, .04], [.04, .8]], 0.0),
    4: ([[.1, .02], [.02, .1]], [[.8, .04], [.04, .8]], 0.0),
    5: ([[.1, 0], [0, .1]], [[.8, 0], [0, .8]], 0.7),
    6: ([[.1, .02], [.02, .1]], [[.8, .04], [.04, .8]], 0.7),
    7: ([[.1, 0], [.07, .1]], [[.8, 0], [0, .8]], 0.0),
    8: ([[.1, 0], [0, .1]], [[.8, .04], [0, .8]], 0.7),
    9: ([[.1, 0], [.05, .1]], [[.8, .04], [0, .8]], 0.0),
    10: ([[.1, 0], [.1, .2]], [[.8, .07], [0, .6]], 0.7),
    11: ([[.1, 0], [.05, .1]], [[.8, .03], [0, .8]], 0.7),
    12: ([[.2, 0], [.07, .1]], [[.7, 0], [.02, .5]], 0.5),
}

EXAMPLE_DF = 10.0

# reference bivariate QMLE estimates on simulated data: (alpha, beta, rho)
REFERENCE_QMLE = {
    11: ([[.130, 0], [.056, .125]], [[.778, .025], [.039, .790]], .7),
    12: ([[.276, 0], [.078, .071]], [[.685, .004], [.004, .638]], .504),
}

# reference componentwise t-MLE estimates on simulated data: component -> (a1, b1, df)
REFERENCE_T_MLE = {
    11: {0: (.137, .831, 9.81), 1: (.169, .802, 10.00)},
    12: {0: (.254, .698, 10.00), 1: (.232, .633, 7.88)},
}

# bivariate QMLE fit to the USD-DEM / USD-FRF residuals
FX_FIT = ([[.214, .013], [.110, .223]], [[.697, .008], [.280, .663]], .372)


def example(number, df=EXAMPLE_DF):
    """Return (params, innovations) for simulation example ``number``."""
    try:
        alpha, beta, rho = _TABLE[number]
    except KeyError:
        raise ValueError(f"unknown example {number}; choose 1-12") from None
    return BivariateGarchParams(_A0, alpha, beta), InnovationSpec.from_df(df, rho)


def example_numbers():
    return sorted(_TABLE)

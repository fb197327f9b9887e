"""Scalar kernels for the normal family.

Everything numeric lives in ``@njit`` functions working on the standard
normal; the public wrappers validate arguments, standardize and dispatch.
The CDF is erfc based (libm, relative error near 1e-16), the quantile is
Acklam's rational initializer polished with Halley steps against that CDF.
"""
from settings import *
from errors import DomainError

# Acklam's coefficients
_A = np.array([-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
               1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00])
_B = np.array([-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
               6.680131188771972e+01, -1.328068155288572e+01])
_C = np.array([-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
               -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00])
_D = np.array([7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
               3.754408661907416e+00])
_P_LOW = 0.02425


@njit(cache=True)
def std_pdf(x):
    return math.exp(-0.5 * x * x) / SQRT_2PI


@njit(cache=True)
def std_cdf(x):
    return 0.5 * math.erfc(-x / SQRT_2)


@njit(cache=True)
def std_sf(x):
    return 0.5 * math.erfc(x / SQRT_2)


@njit(cache=True)
def std_log_cdf(x):
    if x > 6.0:
        return math.log1p(-std_sf(x))
    if x > LOG_CDF_TAIL_X:
        return math.log(std_cdf(x))

    # log phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 ...)
    log_lhs = -0.5 * x * x - math.log(-x) - LOG_SQRT_2PI
    last_total = 0.0
    total = 1.0
    numerator = 1.0
    denom_factor = 1.0
    inv_x2 = 1.0 / (x * x)
    sign = 1.0
    i = 0
    while abs(last_total - total) > 1e-17 and i < 50:
        i += 1
        last_total = total
        sign = -sign
        denom_factor *= inv_x2
        numerator *= 2 * i - 1
        total += sign * numerator * denom_factor
    return log_lhs + math.log(total)


@njit(cache=True)
def _acklam(p):
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) /
                ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    if p > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log1p(-p))
        return -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) /
                 ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    q = p - 0.5
    r = q * q
    return ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q /
            (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))


@njit(cache=True)
def std_quantile(p):
    x = _acklam(p)
    for _ in range(QUANTILE_REFINE_STEPS):
        # work on the smaller tail so the residual keeps its relative accuracy
        if p < 0.5:
            e = std_cdf(x) - p
        else:
            e = (1.0 - p) - std_sf(x)
        u = e * SQRT_2PI * math.exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


@njit(cache=True)
def _cdf_loop(xs, mean, sd, out):
    for i in range(xs.shape[0]):
        out[i] = std_cdf((xs[i] - mean) / sd)
    return out


@njit(cache=True)
def _pdf_loop(xs, mean, sd, out):
    for i in range(xs.shape[0]):
        out[i] = std_pdf((xs[i] - mean) / sd) / sd
    return out


def _check_variance(variance):
    if not variance > 0.0 or not math.isfinite(variance):
        raise DomainError(f"variance must be positive and finite, got {variance!r}")
    return math.sqrt(variance)


def normal_pdf(x: float, mean: float = 0.0, variance: float = 1.0) -> float:
    sd = _check_variance(variance)
    return std_pdf((x - mean) / sd) / sd


def log_normal_pdf(x: float, mean: float = 0.0, variance: float = 1.0) -> float:
    _check_variance(variance)
    d = x - mean
    return -0.5 * d * d / variance - 0.5 * math.log(variance) - LOG_SQRT_2PI


def normal_cdf(x: float, mean: float = 0.0, variance: float = 1.0) -> float:
    """Pr(X <= x) for X ~ N(mean, variance); +-inf map to 0 and 1."""
    sd = _check_variance(variance)
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    return std_cdf((x - mean) / sd)


def normal_sf(x: float, mean: float = 0.0, variance: float = 1.0) -> float:
    sd = _check_variance(variance)
    if math.isinf(x):
        return 0.0 if x > 0 else 1.0
    return std_sf((x - mean) / sd)


def log_normal_cdf(x: float, mean: float = 0.0, variance: float = 1.0) -> float:
    sd = _check_variance(variance)
    if math.isinf(x):
        return 0.0 if x > 0 else -math.inf
    return std_log_cdf((x - mean) / sd)


def normal_quantile(p: float, mean: float = 0.0, variance: float = 1.0) -> float:
    sd = _check_variance(variance)
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    return mean + sd * std_quantile(p)


def normal_cdf_array(xs, mean: float = 0.0, variance: float = 1.0) -> np.ndarray:
    sd = _check_variance(variance)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    return _cdf_loop(xs, float(mean), sd, np.empty_like(xs))


def normal_pdf_array(xs, mean: float = 0.0, variance: float = 1.0) -> np.ndarray:
    sd = _check_variance(variance)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    return _pdf_loop(xs, float(mean), sd, np.empty_like(xs))

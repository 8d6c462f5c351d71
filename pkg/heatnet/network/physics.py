import math

from heatnet.core.exceptions import NetworkValidationError

# D/k must exceed this for the Nikuradse argument to stay positive
MIN_RELATIVE_DIAMETER = 10 ** (-0.569)


def nikuradse(diameter: float, roughness: float) -> float:
    """Flow-independent friction factor λ = (2 log10(D/k) + 1.138)^-2"""
    if diameter <= 0 or roughness <= 0:
        raise NetworkValidationError(
            f"friction factor needs positive diameter and roughness, got D={diameter}, k={roughness}"
        )
    ratio = diameter / roughness
    if ratio <= MIN_RELATIVE_DIAMETER:
        raise NetworkValidationError(f"D/k={ratio:.4g} outside the Nikuradse domain")
    return (2.0 * math.log10(ratio) + 1.138) ** -2


def friction_factor(pipe) -> float:
    return nikuradse(pipe.diameter, pipe.roughness)


def area(diameter: float) -> float:
    if diameter <= 0:
        raise NetworkValidationError(f"cross section needs a positive diameter, got {diameter}")
    return math.pi * (diameter / 2.0) ** 2


def cross_section(pipe) -> float:
    """Cross-sectional area π(D/2)² in m²"""
    return area(pipe.diameter)

import math


def z_score(successes, samples, p):
    """Standardized deviation of an observed frequency from probability p."""
    sigma = math.sqrt(max(p * (1 - p), 1e-300) / samples)
    return (successes / samples - p) / sigma

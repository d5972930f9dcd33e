"""Seeded random surface expressions for round-trip tests."""
import random

_HEADS = {"H": "D_H", "K": "D_K", "HO": "D_HO", "SHO": "D_HO", "KO": "D_KO", "SKO": "D_KO"}


def _rational(rng):
    a = rng.randint(-5, 5) or 1
    if rng.random() < 0.3:
        return f"{abs(a)}/{rng.randint(2, 6)}" if a > 0 else f"-{-a}/{rng.randint(2, 6)}"
    return str(a)


def _monomial(config, rng):
    # parity-homogeneous, so operator heads accept it
    N = config.m + config.n
    k = rng.randint(0, 3)
    if k == 0:
        return str(rng.randint(1, 3))
    return "*".join(f"x{rng.randint(1, N)}" for _ in range(k))


def function(config, rng, depth=2):
    N = config.m + config.n
    r = rng.random()
    if depth == 0 or r < 0.3:
        return rng.choice([_rational(rng), f"x{rng.randint(1, N)}"])
    if r < 0.5:
        return f"{function(config, rng, depth - 1)} {rng.choice('+-')} {function(config, rng, depth - 1)}"
    if r < 0.7:
        return f"({function(config, rng, depth - 1)})*({function(config, rng, depth - 1)})"
    if r < 0.8:
        return f"x{rng.randint(1, config.m)}^{rng.randint(0, 3)}"
    if r < 0.9:
        return f"-({function(config, rng, depth - 1)})"
    if config.family in ("KO", "SKO"):
        return f"div_lambda({_rational(rng)}; {_monomial(config, rng)})"
    return f"div({field(config, rng, 0)})"


def field(config, rng, depth=2):
    N = config.m + config.n
    r = rng.random()
    if depth == 0 or r < 0.25:
        if config.family in _HEADS and rng.random() < 0.5:
            return f"{_HEADS[config.family]}({_monomial(config, rng)})"
        return f"{_monomial(config, rng)}*p{rng.randint(1, N)}"
    if r < 0.45:
        return f"{field(config, rng, depth - 1)} {rng.choice('+-')} {field(config, rng, depth - 1)}"
    if r < 0.6:
        return f"bracket({field(config, rng, depth - 1)}, {field(config, rng, depth - 1)})"
    if r < 0.75:
        return f"({function(config, rng, 1)})*({field(config, rng, depth - 1)})"
    if r < 0.85:
        return f"D({rng.randint(1, N)}, {rng.randint(1, N)}; {_monomial(config, rng)})"
    return f"({field(config, rng, depth - 1)})*{_rational(rng)}"


def expression(config, rng: random.Random) -> str:
    return field(config, rng) if rng.random() < 0.6 else function(config, rng)

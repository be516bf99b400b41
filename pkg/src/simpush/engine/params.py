from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class QueryParams:
    """Per-query constants derived from ``(c, eps, delta)``.

    ``eps_h`` is the hitting-probability threshold for attention nodes and
    the pruning threshold of the reverse push; ``L_star`` caps the number
    of levels explored; ``n_walks`` is the number of sqrt(c)-walks used to
    detect the level count.
    """

    c: float
    eps: float
    delta: float
    eps_h: float
    L_star: int
    n_walks: int
    seed: int = 0

    @property
    def sqrt_c(self) -> float:
        return math.sqrt(self.c)

    @property
    def attention_bound(self) -> int:
        """Upper bound on the total number of attention occurrences."""
        return attention_bound(self.c, self.eps_h)


def _check_open_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 < value < 1.0 or math.isnan(value):
        raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
    return value


def level_cap(c: float, eps_h: float) -> int:
    return max(0, math.floor(math.log(1.0 / eps_h) / math.log(1.0 / math.sqrt(c))))


def attention_bound(c: float, eps_h: float) -> int:
    sc = math.sqrt(c)
    return math.floor(sc / ((1.0 - sc) * eps_h))


def walk_budget(c: float, eps_h: float, delta: float) -> int:
    sc = math.sqrt(c)
    half = math.ceil(math.log(1.0 / ((1.0 - sc) * eps_h * delta)) / eps_h ** 2)
    return max(2, 2 * half)


def derive_params(c: float = 0.6, eps: float = 0.02, delta: float = 1e-4, seed: int = 0) -> QueryParams:
    c = _check_open_unit("c", c)
    eps = _check_open_unit("eps", eps)
    delta = _check_open_unit("delta", delta)
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    sc = math.sqrt(c)
    eps_h = (1.0 - sc) / (3.0 * sc) * eps
    return QueryParams(
        c=c,
        eps=eps,
        delta=delta,
        eps_h=eps_h,
        L_star=level_cap(c, eps_h),
        n_walks=walk_budget(c, eps_h, delta),
        seed=seed,
    )

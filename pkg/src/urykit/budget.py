import os

DEFAULT_POINT_BUDGET = 20_000


def point_budget(explicit: int | None = None) -> int:
    """Resolve a point budget: explicit value, then ``URYKIT_BUDGET``, then the default."""
    if explicit is not None:
        return explicit
    raw = os.environ.get("URYKIT_BUDGET")
    if raw:
        return int(raw)
    return DEFAULT_POINT_BUDGET

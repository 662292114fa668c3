"""Computational zero-sum theory over finite abelian groups.

Sumsets, regular sequences, Davenport constants, exact c0 search, and
group-algebra vanishing certificates, with a CLI for reproducible JSON
reports.
"""

from .groups import (
    AbelianGroup,
    Element,
    ElementSet,
    EnumerationBudgetExceeded,
    InvalidElement,
    InvalidGroup,
    Subgroup,
    make_group,
)
from .sequences import (
    RetryBudgetExceeded,
    Sequence,
    is_basis,
    is_regular,
    missing_elements,
    random_regular,
    restrict,
    sigma0_set,
    sigma_set,
    sigma_sum,
    violating_subgroup,
)

__version__ = "0.1.0"

"""Snarl data model and predicates: codimension profiles, the two
codimension hypotheses, splitting / transverse-splitting verification, and
the one-dimensional general-position check.

A snarl is an ordered, labelled family of proper nonzero subspaces of a
fixed ambient space.  Every predicate here is decided in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .linalg import (Mat, Subspace, constraint_matrix, frac_str, intersect,
                     rank, subspace_sum)


class NonOneDimensional(Exception):
    """Raised when a codim-1-only predicate meets a higher-codim entry."""


class Snarl:
    """Ambient dimension plus an ordered list of (label, subspace) entries.

    Every subspace must be proper and nonzero (codimension in [1, m-1]);
    labels are unique.  Immutable after construction.
    """

    __slots__ = ("ambient_dim", "entries")

    def __init__(self, ambient_dim: int, entries):
        self.ambient_dim = ambient_dim
        self.entries = list(entries)
        seen = set()
        for label, sub in self.entries:
            if label in seen:
                raise ValueError(f"duplicate label {label!r}")
            seen.add(label)
            if sub.ambient_dim != ambient_dim:
                raise ValueError(f"entry {label!r}: ambient dimension mismatch")
            if not 1 <= sub.codim <= ambient_dim - 1:
                raise ValueError(
                    f"entry {label!r}: codimension {sub.codim} outside [1, {ambient_dim - 1}]")

    def labels(self) -> list[str]:
        return [label for label, _ in self.entries]

    def subspace(self, label: str) -> Subspace:
        for lab, sub in self.entries:
            if lab == label:
                return sub
        raise KeyError(label)

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return (isinstance(other, Snarl)
                and self.ambient_dim == other.ambient_dim
                and self.entries == other.entries)

    def __repr__(self):
        return f"Snarl(m={self.ambient_dim}, entries={self.labels()})"

    def replace(self, drop_label: str, new_entries) -> "Snarl":
        """New snarl with drop_label removed and new entries appended."""
        kept = [(lab, sub) for lab, sub in self.entries if lab != drop_label]
        return Snarl(self.ambient_dim, kept + list(new_entries))


@dataclass(frozen=True)
class SplitWitness:
    """Names the indices involved in a splitting: the replaced entry, the
    two replacement entries, and the partition of the remaining labels."""

    alpha0: str
    beta1: str
    beta2: str
    partition: tuple[frozenset, frozenset]


def codim_profile(s: Snarl) -> list[tuple[str, int]]:
    return [(label, sub.codim) for label, sub in s.entries]


def check_strong_hypothesis(s: Snarl) -> bool:
    """2·max(codim) + sum(codim) <= 2m."""
    kappas = [sub.codim for _, sub in s.entries]
    if not kappas:
        return True
    return 2 * max(kappas) + sum(kappas) <= 2 * s.ambient_dim


def check_weak_hypothesis(s: Snarl) -> bool:
    """max(codim) + sum(codim) <= 2m."""
    kappas = [sub.codim for _, sub in s.entries]
    if not kappas:
        return True
    return max(kappas) + sum(kappas) <= 2 * s.ambient_dim


def intersect_indexed(s: Snarl, labels) -> Subspace:
    """Intersection of the entries named by a nonempty label set."""
    labels = list(labels)
    if not labels:
        raise ValueError("empty label set")
    out = s.subspace(labels[0])
    for lab in labels[1:]:
        out = intersect(out, s.subspace(lab))
    return out


def is_splitting(parent: Snarl, child: Snarl, w: SplitWitness) -> bool:
    """Does the child replace entry alpha0 by two entries beta1, beta2 whose
    intersection is the removed subspace and whose codimensions add up?"""
    if child.ambient_dim != parent.ambient_dim:
        return False
    if len(child) != len(parent) + 1:
        return False
    plabels = set(parent.labels())
    clabels = set(child.labels())
    if w.alpha0 not in plabels or w.alpha0 in clabels:
        return False
    if {w.beta1, w.beta2} & plabels or not {w.beta1, w.beta2} <= clabels:
        return False
    if clabels - {w.beta1, w.beta2} != plabels - {w.alpha0}:
        return False
    for lab in plabels - {w.alpha0}:
        if parent.subspace(lab) != child.subspace(lab):
            return False
    v0 = parent.subspace(w.alpha0)
    w1 = child.subspace(w.beta1)
    w2 = child.subspace(w.beta2)
    if intersect(w1, w2) != v0:
        return False
    return w1.codim + w2.codim == v0.codim


def is_transverse_splitting(parent: Snarl, child: Snarl, w: SplitWitness) -> bool:
    """is_splitting plus the four positional conditions: beta1 meets the
    intersection over the first partition block nontrivially (likewise
    beta2 / second block), the two new subspaces span the ambient space,
    and each new subspace plus the removed one is proper."""
    if not is_splitting(parent, child, w):
        return False
    s1, s2 = w.partition
    rest = set(parent.labels()) - {w.alpha0}
    if not s1 or not s2 or (s1 & s2) or (s1 | s2) != rest:
        return False
    v0 = parent.subspace(w.alpha0)
    w1 = child.subspace(w.beta1)
    w2 = child.subspace(w.beta2)
    if intersect(w1, intersect_indexed(parent, s1)).dim == 0:
        return False
    if intersect(w2, intersect_indexed(parent, s2)).dim == 0:
        return False
    if not subspace_sum(w1, w2).is_full():
        return False
    if subspace_sum(w1, v0).is_full() or subspace_sum(w2, v0).is_full():
        return False
    return True


def is_onedim_general_position(s: Snarl) -> bool:
    """For a snarl of hyperplanes: is every set of <= m of the normal
    directions linearly independent?

    Checking subsets of size exactly min(n, m) suffices: a full-rank set
    has full-rank subsets.
    """
    m = s.ambient_dim
    normals = []
    for label, sub in s.entries:
        if sub.codim != 1:
            raise NonOneDimensional(f"entry {label!r} has codimension {sub.codim}")
        normals.append(constraint_matrix(sub).row(0))
    k = min(len(normals), m)
    if k == 0:
        return True
    for subset in combinations(range(len(normals)), k):
        if rank(Mat([normals[i] for i in subset])) != k:
            return False
    return True


# ---------------------------------------------------------------------------
# JSON wire format


def subspace_to_json(sub: Subspace) -> list[list[str]]:
    return [[frac_str(x) for x in v] for v in sub.basis]


def snarl_to_json(s: Snarl) -> dict:
    return {
        "m": s.ambient_dim,
        "subspaces": [{"label": lab, "basis": subspace_to_json(sub)}
                      for lab, sub in s.entries],
    }


def subspace_from_json(m: int, basis) -> Subspace:
    return Subspace(m, [[Fraction(str(x)) for x in v] for v in basis])


def snarl_from_json(obj: dict) -> Snarl:
    m = int(obj["m"])
    entries = [(e["label"], subspace_from_json(m, e["basis"])) for e in obj["subspaces"]]
    return Snarl(m, entries)

"""Functional entry points over sampler banks."""

from typing import Iterable, Mapping, TypeVar, Union

from hypersketch.schemas.hypergraph import EdgeLike, Hyperedge
from hypersketch.services.incidence.connectivity_bank import ConnectivityBank
from hypersketch.services.incidence.sampler_bank import SamplerBank
from hypersketch.services.incidence.vertex_bank import VertexBank
from hypersketch.services.sketch.l0_sampler import L0Sampler

Bank = TypeVar("Bank", SamplerBank, ConnectivityBank)


def encode_update(bank: Bank, e: EdgeLike, delta: int) -> Bank:
    return bank.encode_update(e, delta)


def component_sampler(bank: SamplerBank, stage: int, level: int, rate: int, rep: int,
                      component: Iterable[int]) -> L0Sampler:
    return bank.component_sampler(stage, level, rate, rep, component)


def remove_recovered(bank: SamplerBank, edges: Union[Mapping[Hyperedge, int], Iterable[EdgeLike]]) -> SamplerBank:
    return bank.remove_recovered(edges)


def merge(bank_a: VertexBank, bank_b: VertexBank) -> VertexBank:
    """A new bank equal to bank_a + bank_b; raises ConfigMismatchError on differing config or seed."""
    out = bank_a.clone()
    out += bank_b
    return out

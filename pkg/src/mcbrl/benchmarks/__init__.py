"""Benchmark domains: Chain, Tiger, and the iterated prisoner's dilemma."""

from .chain import ChainSpec, build_chain, chain_reward_tensor, chain_transition_tensor
from .ipd import IpdOpponent, IpdSpec, build_ipd, sample_opponent
from .tiger import TigerSpec, build_tiger, tiger_pomdp

DOMAIN_KEYS = ("chain-semitied", "chain-full", "tiger", "ipd")

__all__ = [
    "ChainSpec",
    "IpdOpponent",
    "IpdSpec",
    "TigerSpec",
    "DOMAIN_KEYS",
    "build_chain",
    "build_ipd",
    "build_tiger",
    "chain_reward_tensor",
    "chain_transition_tensor",
    "sample_opponent",
    "tiger_pomdp",
]

"""Privacy-preserving reverse auctions for uncertain crowd-sensing tasks."""

from .baselines import cone_select, cosy_select
from .errors import (ConstraintExhausted, DomainError, EnumTooLarge, GenerationExhausted, HeraldError,
                     Irreplaceable, SizeLimit, Uncoverable, UnknownCase)
from .fixtures import GoldenCase, load_golden
from .instance import (BidProfile, Instance, ScenarioConfig, ValidationReport, Worker, generate_instance,
                       load_instance, make_instance, save_instance, validate_instance)
from .matching import MatchingPair, MatchingSet, fixed_matching, match, outcome_probability
from .mechanism import AuctionResult, expected_social_cost, replay, run_auction
from .oracle import ArrivalModel, OracleResult, brute_force_min_cover, expected_opt_cost, min_cover_cost
from .payment import PaymentProfile, UtilityProfile, determine_payments, replaced_set, utilities
from .scorefn import MatchingDistribution, ScoreKind, matching_probabilities, sensitivity
from .selection import WinningPair, WinningSet, cost_effectiveness, select_winners, selection_threshold

__version__ = "0.1.0"

__all__ = [
    "ArrivalModel",
    "AuctionResult",
    "BidProfile",
    "ConstraintExhausted",
    "DomainError",
    "EnumTooLarge",
    "GenerationExhausted",
    "GoldenCase",
    "HeraldError",
    "Instance",
    "Irreplaceable",
    "MatchingDistribution",
    "MatchingPair",
    "MatchingSet",
    "OracleResult",
    "PaymentProfile",
    "ScenarioConfig",
    "ScoreKind",
    "SizeLimit",
    "Uncoverable",
    "UnknownCase",
    "UtilityProfile",
    "ValidationReport",
    "WinningPair",
    "WinningSet",
    "Worker",
    "brute_force_min_cover",
    "cone_select",
    "cost_effectiveness",
    "cosy_select",
    "determine_payments",
    "expected_opt_cost",
    "expected_social_cost",
    "fixed_matching",
    "generate_instance",
    "load_golden",
    "load_instance",
    "make_instance",
    "match",
    "matching_probabilities",
    "min_cover_cost",
    "outcome_probability",
    "replaced_set",
    "replay",
    "run_auction",
    "save_instance",
    "select_winners",
    "selection_threshold",
    "sensitivity",
    "utilities",
    "validate_instance",
]

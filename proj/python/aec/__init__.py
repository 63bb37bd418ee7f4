from aec._core import (
    BeliefStore,
    GroundedStore,
    GroundingConflict,
    PredicateId,
    audit_gate_semantics,
    audit_no_leakage,
    default_config,
    discretize,
    ground_update,
    insert_belief,
    run_corpus,
    run_refinement,
    run_single,
    soundness_sweep,
    validate_theorem1,
)

__all__ = [
    "BeliefStore",
    "GroundedStore",
    "GroundingConflict",
    "PredicateId",
    "audit_gate_semantics",
    "audit_no_leakage",
    "default_config",
    "discretize",
    "ground_update",
    "insert_belief",
    "run_corpus",
    "run_refinement",
    "run_single",
    "soundness_sweep",
    "validate_theorem1",
]

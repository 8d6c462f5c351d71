from heatnet.nlp.dump import dump_model
from heatnet.nlp.expr import Expr, const, smooth_abs, sqrt, sum_exprs, var
from heatnet.nlp.model import (
    Constraint,
    Evaluation,
    Family,
    NlpModel,
    Relation,
    SlackBlock,
    SlackPolicy,
    Variable,
    evaluate,
    gradient,
)
from heatnet.nlp.slacks import (
    add_slacks,
    default_slack_policy,
    extend_point,
    initialize_slacks,
    scaled_slack_norm,
)

__all__ = [
    "Constraint",
    "Evaluation",
    "Expr",
    "Family",
    "NlpModel",
    "Relation",
    "SlackBlock",
    "SlackPolicy",
    "Variable",
    "add_slacks",
    "const",
    "default_slack_policy",
    "dump_model",
    "evaluate",
    "extend_point",
    "gradient",
    "initialize_slacks",
    "scaled_slack_norm",
    "smooth_abs",
    "sqrt",
    "sum_exprs",
    "var",
]

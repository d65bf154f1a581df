from errors import InputError

from .aggregator import AffineAggregator, Aggregator, ConstantAggregator, TabulatedAggregator

aggregators_config = {
    "constant": ConstantAggregator,
    "affine": AffineAggregator,
    "tabulated": TabulatedAggregator,
}


def make_aggregator(form: str, params: dict | None = None) -> Aggregator:
    try:
        AggregatorClass = aggregators_config[form]
    except KeyError:
        raise InputError(f"unknown aggregator form {form!r}; expected one of {sorted(aggregators_config)}") from None
    try:
        return AggregatorClass(**(params or {}))
    except TypeError as e:
        raise InputError(f"bad params for {form} aggregator: {e}") from e

from typing import Mapping, Optional  # isort:skip
import copy


def merge_dicts(*dicts: Optional[Mapping]) -> dict:
    """
    Deep merge, later dicts win. Nested mappings are merged key by key,
    any other value replaces the earlier one; ``None`` entries are
    skipped. Inputs are not modified.

    Examples:
        >>> merge_dicts({"solver": {"huber_delta": 0.1, "max_iterations": 5}},
        ...             {"solver": {"huber_delta": 0.05}})
        {'solver': {'huber_delta': 0.05, 'max_iterations': 5}}
    """
    assert len(dicts) > 1, "nothing to merge"

    result = copy.deepcopy(dicts[0]) or {}
    for other in dicts[1:]:
        for key, value in (other or {}).items():
            current = result.get(key)
            if isinstance(current, Mapping) and isinstance(value, Mapping):
                result[key] = merge_dicts(current, value)
            else:
                result[key] = copy.deepcopy(value)
    return result


__all__ = ["merge_dicts"]

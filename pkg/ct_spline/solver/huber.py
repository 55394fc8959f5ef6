import numpy as np


class HuberLoss:
    """
    Huber kernel on residual norms ``r = sqrt(e^T Sigma^-1 e)``:
    ``r^2 / 2`` up to ``clip_delta``, linear beyond.

    Args:
        clip_delta (float): transition point, in residual units
        reduction (str): ``"sum"``, ``"mean"`` or ``"none"``
    """
    def __init__(self, clip_delta: float = 0.05, reduction: str = "sum"):
        assert clip_delta > 0, f"clip_delta must be positive, got {clip_delta}"
        self.clip_delta = clip_delta
        self.reduction = reduction or "none"

    def __call__(self, norms, weights=None):
        norms = np.abs(np.asarray(norms, dtype=float))
        quadratic_part = np.minimum(norms, self.clip_delta)
        linear_part = norms - quadratic_part
        loss = 0.5 * quadratic_part**2 + self.clip_delta * linear_part

        if weights is not None:
            loss = loss * weights

        if self.reduction == "mean":
            loss = np.mean(loss)
        elif self.reduction == "sum":
            loss = np.sum(loss)

        return loss

    def weight(self, norms):
        """
        Derivative of the kernel w.r.t. ``r^2 / 2``, i.e. the IRLS weight
        ``min(1, clip_delta / r)`` applied to ``J^T Sigma^-1 J``.
        """
        norms = np.abs(np.asarray(norms, dtype=float))
        safe = np.maximum(norms, np.finfo(float).tiny)
        return np.minimum(1.0, self.clip_delta / safe)


__all__ = ["HuberLoss"]

"""Discrete memoryless broadcast channel W(y1,y2|x) and its file format.

The channel spec file is JSON with fields `x_size`, `y1_size`, `y2_size`
and either `joint` (nested array indexed [x][y1][y2]) or `marginals`
{`w1`, `w2`} implying the conditionally independent product coupling.
Validation is strict at load; nothing is renormalized.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import jsonio
from .exceptions import ValidationError
from .probability import MASS_TOL

ROW_TOL = MASS_TOL


@dataclass(frozen=True, eq=False)
class BroadcastChannel:
    """Conditional law W(y1,y2|x) on finite alphabets, tensor shape (x, y1, y2)."""

    tensor: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.tensor, dtype=np.float64)
        if arr.ndim != 3:
            raise ValidationError(f"BroadcastChannel: tensor must be 3-dimensional, got {arr.shape}")
        if np.any(arr < 0.0):
            x, y1, y2 = (int(i) for i in np.argwhere(arr < 0.0)[0])
            raise ValidationError(
                f"BroadcastChannel: negative probability at x={x}, y1={y1}, y2={y2}"
            )
        for x in range(arr.shape[0]):
            s = math.fsum(arr[x].reshape(-1).tolist())
            if abs(s - 1.0) > ROW_TOL:
                raise ValidationError(
                    f"BroadcastChannel: outputs for x={x} sum to {s!r}, not 1"
                )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "tensor", arr)

    @property
    def x_size(self) -> int:
        return self.tensor.shape[0]

    @property
    def y1_size(self) -> int:
        return self.tensor.shape[1]

    @property
    def y2_size(self) -> int:
        return self.tensor.shape[2]


@dataclass(frozen=True, eq=False)
class MarginalChannel:
    """Single-node transition matrix Wi(y|x), rows indexed by x."""

    matrix: np.ndarray = field(repr=False)
    node: int = 1

    def __post_init__(self):
        if self.node not in (1, 2):
            raise ValidationError(f"MarginalChannel: node must be 1 or 2, got {self.node}")
        arr = np.asarray(self.matrix, dtype=np.float64)
        if arr.ndim != 2:
            raise ValidationError(f"MarginalChannel: matrix must be 2-dimensional, got {arr.shape}")
        if np.any(arr < 0.0):
            x, y = (int(i) for i in np.argwhere(arr < 0.0)[0])
            raise ValidationError(f"MarginalChannel: negative probability at x={x}, y={y}")
        for x in range(arr.shape[0]):
            s = math.fsum(arr[x].tolist())
            if abs(s - 1.0) > ROW_TOL:
                raise ValidationError(f"MarginalChannel: row x={x} sums to {s!r}, not 1")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "matrix", arr)

    @property
    def x_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def y_size(self) -> int:
        return self.matrix.shape[1]


def marginal(ch: BroadcastChannel, node: int) -> MarginalChannel:
    """Per-node transition matrix, the other node's outputs summed out."""
    if node == 1:
        return MarginalChannel(ch.tensor.sum(axis=2), node=1)
    if node == 2:
        return MarginalChannel(ch.tensor.sum(axis=1), node=2)
    raise ValidationError(f"marginal: node must be 1 or 2, got {node}")


def from_marginals(w1, w2) -> BroadcastChannel:
    """Product coupling W(y1,y2|x) = W1(y1|x) W2(y2|x).

    The rate regions depend on the marginals only, so this coupling is
    without loss of generality for region computations.
    """
    m1 = w1.matrix if isinstance(w1, MarginalChannel) else np.asarray(w1, dtype=np.float64)
    m2 = w2.matrix if isinstance(w2, MarginalChannel) else np.asarray(w2, dtype=np.float64)
    if m1.shape[0] != m2.shape[0]:
        raise ValidationError(
            f"from_marginals: input alphabets differ ({m1.shape[0]} vs {m2.shape[0]})"
        )
    return BroadcastChannel(m1[:, :, None] * m2[:, None, :])


def binary_symmetric(p: float) -> np.ndarray:
    """Binary symmetric transition matrix with crossover probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"binary_symmetric: crossover {p} outside [0, 1]")
    return np.array([[1.0 - p, p], [p, 1.0 - p]])


def load_channel(path) -> BroadcastChannel:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read channel file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc

    for key in ("x_size", "y1_size", "y2_size"):
        if key not in raw:
            raise ValidationError(f"{path}: missing field {key!r}")
    shape = (int(raw["x_size"]), int(raw["y1_size"]), int(raw["y2_size"]))

    if "joint" in raw:
        tensor = np.asarray(raw["joint"], dtype=np.float64)
        if tensor.shape != shape:
            raise ValidationError(f"{path}: joint has shape {tensor.shape}, expected {shape}")
        ch = BroadcastChannel(tensor)
    elif "marginals" in raw:
        m = raw["marginals"]
        if "w1" not in m or "w2" not in m:
            raise ValidationError(f"{path}: marginals must contain 'w1' and 'w2'")
        w1 = np.asarray(m["w1"], dtype=np.float64)
        w2 = np.asarray(m["w2"], dtype=np.float64)
        if w1.shape != (shape[0], shape[1]):
            raise ValidationError(f"{path}: w1 has shape {w1.shape}, expected {(shape[0], shape[1])}")
        if w2.shape != (shape[0], shape[2]):
            raise ValidationError(f"{path}: w2 has shape {w2.shape}, expected {(shape[0], shape[2])}")
        ch = from_marginals(w1, w2)
    else:
        raise ValidationError(f"{path}: need either 'joint' or 'marginals'")
    return ch


def save_channel(ch: BroadcastChannel, path) -> None:
    doc = {
        "x_size": ch.x_size,
        "y1_size": ch.y1_size,
        "y2_size": ch.y2_size,
        "joint": ch.tensor,
    }
    jsonio.dump(doc, path)


def load_chain_file(path):
    """Read an auxiliary-chain file: fields p_u, p_v_given_u, p_x_given_v."""
    from .probability import CondDist, Dist  # local import avoids a cycle at module load

    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read chain file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    for key in ("p_u", "p_v_given_u", "p_x_given_v"):
        if key not in raw:
            raise ValidationError(f"{path}: missing field {key!r}")
    return Dist(raw["p_u"]), CondDist(raw["p_v_given_u"]), CondDist(raw["p_x_given_v"])


def save_chain_file(pu, pvu, pxv, path) -> None:
    jsonio.dump(
        {"p_u": pu.probs, "p_v_given_u": pvu.rows, "p_x_given_v": pxv.rows},
        path,
    )

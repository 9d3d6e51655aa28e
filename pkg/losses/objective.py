"""
Training objective over a padded batch.

Every function takes autograd tensors shaped like GateOutputs and returns scalar
tensors. Row and slot masks are constants: padded rows and dropped slots add
nothing to any term.
"""
from autograd.tensor import MASK_VALUE, Tensor
from dataclass.loss_weights import LossBreakdown, LossWeights
from dataclass.model_config import GateOutputs
from model.batch import EpisodeBatch
from typing import Optional, Tuple
import numpy as np


def _zero(like: Tensor) -> Tensor:
    return Tensor(np.zeros((), dtype=like.dtype))


def _masked_mean(values: Tensor, mask: np.ndarray) -> Tensor:
    count = float(mask.sum())
    if count == 0:
        return _zero(values)
    return (values * mask.astype(values.dtype)).sum() * (1.0 / count)


def coverage_loss(y_hat: Tensor, y: np.ndarray, row_mask: np.ndarray, eps: float = 1e-7) -> Tensor:
    """
    Mean binary cross-entropy over the unpadded rows of the batch
    """
    clamped = y_hat.clip(eps, 1.0 - eps)
    y = np.asarray(y, dtype=y_hat.dtype)
    bce = -(clamped.log() * y + (1.0 - clamped).log() * (1.0 - y))
    return _masked_mean(bce, row_mask)


def slot_usage(w: np.ndarray) -> np.ndarray:
    """
    Mean clause gate per slot over the batch
    """
    return np.asarray(w, dtype=np.float64).reshape(-1, np.shape(w)[-1]).mean(axis=0)


def usage_variance(w_bar: np.ndarray, eps: float = 1e-7) -> float:
    """
    Normalized slot-usage variance Var_k(w_bar) / mean_k(w_bar)^2
    """
    w_bar = np.asarray(w_bar, dtype=np.float64)
    mean = w_bar.mean()
    if mean < eps:
        return 0.0
    return float(w_bar.var() / (mean * mean))


def balance_losses(w: Tensor, eps: float = 1e-7) -> Tuple[Tensor, Tensor, Tensor]:
    """
    Switch-style auxiliary loss, CV^2 of normalized mean usage and CV^2 of raw gates.

    w: (B, T) clause gates before slot dropout. Assignment fractions use the
    argmax slot of each episode and carry no gradient.
    """
    b, t = w.shape
    routing = w / (w.sum(axis=-1, keepdims=True) + eps)
    u = routing.mean(axis=0)
    assigned = np.bincount(np.argmax(w.data, axis=-1), minlength=t) / b
    switch = (u * assigned.astype(w.dtype)).sum() * float(t)

    w_bar = w.mean(axis=0)
    mean_usage = w_bar.mean()
    if mean_usage.item() < eps:
        cv_norm = _zero(w)
    else:
        ratio = w_bar / (mean_usage + eps) - 1.0
        cv_norm = (ratio * ratio).sum() * float(t)

    mean_raw = w.mean()
    centered = w - mean_raw
    cv_raw = (centered * centered).mean() / (mean_raw * mean_raw + eps)
    return switch, cv_norm, cv_raw


def max_margin_loss(C: Tensor, y: np.ndarray, row_mask: np.ndarray, slot_mask: Optional[np.ndarray] = None,
                    tau_pos: float = 0.7, tau_neg: float = 0.3) -> Tensor:
    """
    Hinge on the best clause: positives below tau_pos, negatives above tau_neg.

    C: (B, M, T) clause truths. Dropped slots cannot be the best clause.
    """
    if slot_mask is not None:
        C = C.apply_mask(np.asarray(slot_mask)[:, None, :])
    best = C.max(axis=-1)
    y = np.asarray(y, dtype=bool)
    positive = y & row_mask
    negative = ~y & row_mask
    shortfall = (tau_pos - best).clip(0.0, np.inf)
    excess = (best - tau_neg).clip(0.0, np.inf)
    return _masked_mean(shortfall, positive) + _masked_mean(excess, negative)


def _clause_truths(z: Tensor, values: np.ndarray) -> Tensor:
    """
    Clause truths (B, M, T) against per-slot literal values (B, M, T, L)
    """
    b, t, L = z.shape
    return (1.0 - z.reshape(b, 1, t, L) * (1.0 - Tensor(values.astype(z.dtype)))).prod(axis=-1)


def _flipped(lits: np.ndarray, flip: np.ndarray) -> np.ndarray:
    # lits (B, M, L), flip (B, T, L) -> per-slot values (B, M, T, L)
    values = lits[:, :, None, :]
    return np.where(flip[:, None, :, :], 1.0 - values, values)


def responsibilities(C: Tensor, slot_mask: Optional[np.ndarray] = None) -> Tensor:
    """
    softmax over slots of clause truth, dropped slots excluded
    """
    if slot_mask is not None:
        C = C.masked_fill(~np.asarray(slot_mask, dtype=bool)[:, None, :], MASK_VALUE)
    return C.softmax(axis=-1)


def counterfactual_losses(gates: GateOutputs, batch: EpisodeBatch, flip_threshold: float = 0.5,
                          eps: float = 1e-7) -> Tuple[Tensor, Tensor, Tensor, Tensor]:
    """
    Necessity, spuriousness, clause overlap and responsibility balance on positives.

    Which literals get flipped is decided from the gate values and carries no
    gradient; the re-executed clauses do.
    """
    z, w, C, y_hat = gates.z, gates.w, gates.C, gates.y_hat
    b, t, L = z.shape
    slot_mask = gates.slot_mask
    positive = np.asarray(batch.y, dtype=bool) & batch.row_mask
    if not positive.any():
        zero = _zero(z)
        return zero, zero, zero, zero

    lits = batch.exec_lits
    valid = batch.lit_mask[:, None, :]
    selected = (z.data > flip_threshold) & valid
    ignored = (z.data <= flip_threshold) & valid

    r = responsibilities(C, slot_mask)

    # Necessity: flipping a clause's selected literals should make it false
    C_sel = _clause_truths(z, _flipped(lits, selected))
    nec = _masked_mean((r * C_sel).sum(axis=-1), positive)

    # Spuriousness: flipping ignored literals should not move the prediction
    active = w if slot_mask is None else w.apply_mask(slot_mask)
    C_ign = _clause_truths(z, _flipped(lits, ignored))
    y_flip = 1.0 - (1.0 - active.reshape(b, 1, t) * C_ign).prod(axis=-1)
    spur = _masked_mean((y_hat - y_flip).abs(), positive)

    # Overlap: sum over slot pairs k < k' of C_k C_k'
    fired = C if slot_mask is None else C.apply_mask(np.asarray(slot_mask)[:, None, :])
    total = fired.sum(axis=-1)
    pairs = (total * total - (fired * fired).sum(axis=-1)) * 0.5
    ovl = _masked_mean(pairs, positive) * (1.0 / (t * (t - 1) / 2))

    # Negative mean responsibility entropy
    entropy = -(r * r.clip(eps, 1.0).log()).sum(axis=-1)
    cf_bal = -_masked_mean(entropy, positive)
    return nec, spur, ovl, cf_bal


def _binary_entropy(g: Tensor, eps: float) -> Tensor:
    clamped = g.clip(eps, 1.0 - eps)
    h = -(g * clamped.log() + (1.0 - g) * (1.0 - clamped).log())
    # 0 log 0 = 0: hard gates contribute exactly nothing
    return h.masked_fill((g.data == 0.0) | (g.data == 1.0), 0.0)


def entropy_and_repulsion(z: Tensor, w: Tensor, lit_mask: np.ndarray, eps: float = 1e-7) -> Tuple[Tensor, Tensor]:
    """
    Mean binary entropy of all gates, and mean pairwise cosine similarity between
    the literal-gate vectors of distinct slots
    """
    b, t, L = z.shape
    z_mask = np.broadcast_to(lit_mask[:, None, :], z.shape)
    count = float(z_mask.sum() + w.size)
    ent = ((_binary_entropy(z, eps) * z_mask.astype(z.dtype)).sum() + _binary_entropy(w, eps).sum()) * (1.0 / count)

    norms = ((z * z).sum(axis=-1, keepdims=True) + eps) ** 0.5
    unit = z / norms
    cosine = unit @ unit.swapaxes(-1, -2)
    off_diagonal = ~np.eye(t, dtype=bool)
    rep = (cosine * off_diagonal.astype(z.dtype)).sum() * (1.0 / (b * t * (t - 1)))
    return ent, rep


def total_loss(gates: GateOutputs, batch: EpisodeBatch, weights: LossWeights) -> Tuple[Tensor, LossBreakdown]:
    """
    Weighted objective and its logged breakdown. Terms whose weight is zero are
    skipped and logged as 0.
    """
    eps = weights.eps
    cov = coverage_loss(gates.y_hat, batch.y, batch.row_mask, eps)
    total = cov
    row = LossBreakdown(cov=cov.item())

    if weights.lambda_b > 0:
        switch, cv_norm, cv_raw = balance_losses(gates.w, eps)
        bal = switch + cv_norm + cv_raw
        total = total + bal * weights.lambda_b
        row.bal, row.bal_switch, row.bal_cv_norm, row.bal_cv_raw = bal.item(), switch.item(), cv_norm.item(), cv_raw.item()

    if weights.lambda_r > 0 or weights.lambda_e > 0:
        ent, rep = entropy_and_repulsion(gates.z, gates.w, batch.lit_mask, eps)
        total = total + rep * weights.lambda_r + ent * weights.lambda_e
        row.ent, row.rep = ent.item(), rep.item()

    if weights.lambda_m > 0:
        mm = max_margin_loss(gates.C, batch.y, batch.row_mask, gates.slot_mask, weights.tau_pos, weights.tau_neg)
        total = total + mm * weights.lambda_m
        row.mm = mm.item()

    if weights.lambda_cf > 0:
        nec, spur, ovl, cf_bal = counterfactual_losses(gates, batch, weights.flip_threshold, eps)
        cf = nec + spur + ovl * weights.lambda_o + cf_bal * weights.lambda_c
        total = total + cf * weights.lambda_cf
        row.nec, row.spur, row.ovl, row.cf_bal = nec.item(), spur.item(), ovl.item(), cf_bal.item()

    row.total = total.item()
    return total, row

"""Text formats for messages (``k:hex``) and parameter documents (``key=value`` lines)."""

from __future__ import annotations

import numpy as np

from .codec2d import CodeParams2D, derive_params_2d
from .codec3d import CodeParams3D, derive_params_3d
from .errors import GridFormatError
from .robust import RobustParams, validate_params_robust

KINDS = ("2d", "3d", "robust")


def message_to_hex(msg, q: int) -> str:
    """``k:hex`` with bits packed MSB-first for q=2 and one byte per symbol otherwise."""
    msg = np.asarray(msg, dtype=np.uint8)
    body = np.packbits(msg).tobytes() if q == 2 else msg.tobytes()
    return f"{len(msg)}:{body.hex()}"


def message_from_hex(text: str, q: int) -> np.ndarray:
    head, sep, body = text.strip().partition(":")
    if not sep or not head.isdigit():
        raise GridFormatError("message must look like '<length>:<hex>'")
    k = int(head)
    try:
        raw = np.frombuffer(bytes.fromhex(body), dtype=np.uint8)
    except ValueError as exc:
        raise GridFormatError(f"bad hex in message: {exc}") from exc
    if q == 2:
        if len(raw) != (k + 7) // 8:
            raise GridFormatError(f"{len(raw)} bytes cannot hold exactly {k} bits")
        bits = np.unpackbits(raw)
        if bits[k:].any():
            raise GridFormatError("nonzero padding bits after the message")
        return bits[:k]
    if len(raw) != k:
        raise GridFormatError(f"expected {k} symbol bytes, got {len(raw)}")
    if k and raw.max() >= q:
        raise GridFormatError(f"symbol {int(raw.max())} out of range for q={q}")
    return raw.copy()


def params_to_doc(p: CodeParams2D | CodeParams3D | RobustParams) -> str:
    if isinstance(p, RobustParams):
        fields = {"kind": "robust", **p.base.as_dict(), "delta": p.delta, "Q": p.Q,
                  "L": p.L, "k_robust": p.k}
    elif isinstance(p, CodeParams3D):
        fields = {"kind": "3d", **p.as_dict()}
    else:
        fields = {"kind": "2d", **p.as_dict()}
    return "".join(f"{key}={value}\n" for key, value in fields.items())


def parse_doc(text: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise GridFormatError(f"line {lineno}: expected key=value, got {line!r}")
        out[key.strip()] = value.strip()
    return out


def _int(doc: dict, key: str, required: bool = True) -> int | None:
    if key not in doc:
        if required:
            raise GridFormatError(f"parameter document lacks {key!r}")
        return None
    try:
        return int(doc[key])
    except ValueError as exc:
        raise GridFormatError(f"{key}={doc[key]!r} is not an integer") from exc


def params_from_doc(text: str):
    """Re-derive parameters from ``q, M, h`` (plus ``n``, ``n_prime``, ``delta``).

    Derived fields present in the document must agree with the re-derivation.
    """
    doc = parse_doc(text)
    kind = doc.get("kind", "2d")
    if kind not in KINDS:
        raise GridFormatError(f"unknown parameter kind {kind!r}")
    q, M, h = _int(doc, "q"), _int(doc, "M"), _int(doc, "h")
    if kind == "3d":
        p = derive_params_3d(q, M, h, _int(doc, "n", False), _int(doc, "n_prime", False))
        fields = p.as_dict()
    else:
        p = derive_params_2d(q, M, h, _int(doc, "n", False))
        fields = p.as_dict()
        if kind == "robust":
            p = validate_params_robust(p, _int(doc, "delta"))
    for key, value in fields.items():
        if key in doc and str(value) != doc[key]:
            raise GridFormatError(f"document says {key}={doc[key]} but parameters give {value}")
    return p

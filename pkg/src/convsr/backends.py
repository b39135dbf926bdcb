"""Shared construction of backends and modes from textual specs.

Backend specs are ``lexical`` / ``heuristic`` / ``oracle`` for the in-process
implementations, or ``remote:<url>`` to target an HTTP model server.  Policy
names follow the CLI spelling (``init-prev`` etc.).
"""

from __future__ import annotations

from .core import SelectionConfig
from .ingest import RewriteIndex
from .pipeline import BaselineMode, ConvsrMode, Mode, QrPipelineMode, Rewriter
from .reader import HistoryPolicy, LexicalParams, ReaderBackend
from .sr import SRGeneratorBackend

POLICY_NAMES = {
    "none": "none",
    "init": "prepend_init",
    "prev": "prepend_prev",
    "init-prev": "prepend_init_prev",
    "all": "prepend_all",
    "dynamic": "dynamic",
}


def _remote_url(spec: str) -> str | None:
    if spec.startswith("remote:"):
        return spec.split(":", 1)[1]
    return None


def reader_from_spec(spec: str, params: LexicalParams | None = None) -> ReaderBackend:
    url = _remote_url(spec)
    if url is not None:
        return ReaderBackend(kind="remote", endpoint=url)
    if spec != "lexical":
        raise ValueError(f"unknown reader spec {spec!r} (expected 'lexical' or 'remote:<url>')")
    return ReaderBackend(kind="lexical", params=params or LexicalParams())


def generator_from_spec(spec: str, fallback_to_heuristic: bool = False) -> SRGeneratorBackend:
    url = _remote_url(spec)
    if url is not None:
        return SRGeneratorBackend(kind="remote", endpoint=url,
                                  fallback_to_heuristic=fallback_to_heuristic)
    if spec != "heuristic":
        raise ValueError(f"unknown generator spec {spec!r} (expected 'heuristic' or 'remote:<url>')")
    return SRGeneratorBackend(kind="heuristic")


def rewriter_from_spec(spec: str, index: RewriteIndex | None = None) -> Rewriter:
    url = _remote_url(spec)
    if url is not None:
        return Rewriter(kind="remote", endpoint=url)
    if spec != "oracle":
        raise ValueError(f"unknown rewriter spec {spec!r} (expected 'oracle' or 'remote:<url>')")
    return Rewriter(kind="oracle", index=index if index is not None else RewriteIndex())


def policy_from_name(name: str, selection: SelectionConfig | None = None) -> HistoryPolicy:
    if name not in POLICY_NAMES:
        raise ValueError(f"unknown policy {name!r} (expected one of {sorted(POLICY_NAMES)})")
    kind = POLICY_NAMES[name]
    if kind == "dynamic":
        return HistoryPolicy.dynamic(selection or SelectionConfig())
    return HistoryPolicy(kind)


def build_mode(name: str, *, policy: str = "dynamic", with_sr: bool = False,
               selection: SelectionConfig | None = None,
               generator: SRGeneratorBackend | None = None,
               rewriter: Rewriter | None = None,
               assess: bool = True) -> Mode:
    selection = selection or SelectionConfig()
    generator = generator or SRGeneratorBackend()
    if name == "convsr":
        return ConvsrMode(selection=selection, generator=generator, assess_enabled=assess)
    if name == "pipeline":
        if rewriter is None:
            raise ValueError("pipeline mode requires a rewriter")
        return QrPipelineMode(rewriter=rewriter)
    if name == "baseline":
        return BaselineMode(policy=policy_from_name(policy, selection),
                            with_sr=with_sr, generator=generator)
    raise ValueError(f"unknown mode {name!r} (expected convsr, pipeline, or baseline)")

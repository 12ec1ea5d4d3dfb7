"""Encoder-decoder models: transformer (absolute or tree positions), graph
convolutional, and LSTM encoders, all feeding one shared transformer decoder.

The decoder self-attends causally and cross-attends from every decoder layer
to the encoder's final hidden states only. Encoder states are 128-wide and
decoder states 64-wide; the cross-attention projects keys and values down
from the encoder width, so no extra bridging layer is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from .vocab import PAD_ID, VOCAB_SIZE

ENCODER_KINDS = ("transformer_abs", "transformer_tree", "gcn", "lstm")


class InvalidConfig(ValueError):
    pass


@dataclass
class ModelConfig:
    encoder_kind: str = "transformer_abs"
    enc_layers: int = 6
    dec_layers: int = 6
    heads: int = 4
    ff_size: int = 512
    enc_embed: int = 128
    dec_embed: int = 64
    gcn_layers: int = 16
    lstm_layers: int = 6
    dropout: float = 0.1
    depth_cap: int = 16
    max_len: int = 256

    def validate(self) -> None:
        if self.encoder_kind not in ENCODER_KINDS:
            raise InvalidConfig(f"unknown encoder kind {self.encoder_kind!r}")
        if self.enc_embed % self.heads or self.dec_embed % self.heads:
            raise InvalidConfig("embedding sizes must be divisible by the head count")
        if min(self.enc_layers, self.dec_layers, self.gcn_layers, self.lstm_layers) < 1:
            raise InvalidConfig("layer counts must be positive")

    @property
    def wraps_input(self) -> bool:
        """Only the encoders without structural annotations see begin/end markers."""
        return self.encoder_kind in ("transformer_abs", "lstm")

    @property
    def needs_paths(self) -> bool:
        return self.encoder_kind == "transformer_tree"

    @property
    def needs_adjacency(self) -> bool:
        return self.encoder_kind == "gcn"


def sinusoidal_positions(max_len: int, dim: int) -> torch.Tensor:
    position = torch.arange(max_len).unsqueeze(1).float()
    div = torch.exp(torch.arange(0, dim, 2).float() * (-math.log(10000.0) / dim))
    table = torch.zeros(max_len, dim)
    table[:, 0::2] = torch.sin(position * div)
    table[:, 1::2] = torch.cos(position * div)
    return table


class TransformerEncoder(nn.Module):
    """Self-attention encoder; positions are absolute or tree-path based."""

    def __init__(self, cfg: ModelConfig, tree_positions: bool):
        super().__init__()
        d = cfg.enc_embed
        self.embed = nn.Embedding(VOCAB_SIZE, d, padding_idx=PAD_ID)
        self.scale = math.sqrt(d)
        self.tree_positions = tree_positions
        if tree_positions:
            self.path_proj = nn.Linear(2 * cfg.depth_cap, d)
        else:
            self.register_buffer("positions", sinusoidal_positions(cfg.max_len, d))
        self.dropout = nn.Dropout(cfg.dropout)
        layer = nn.TransformerEncoderLayer(
            d_model=d,
            nhead=cfg.heads,
            dim_feedforward=cfg.ff_size,
            dropout=cfg.dropout,
            batch_first=True,
        )
        self.layers = nn.TransformerEncoder(layer, num_layers=cfg.enc_layers)

    def forward(self, batch):
        x = self.embed(batch.src) * self.scale
        if self.tree_positions:
            x = x + self.path_proj(batch.paths)
        else:
            x = x + self.positions[: x.size(1)]
        x = self.dropout(x)
        return self.layers(x, src_key_padding_mask=batch.src_pad)


class GCNEncoder(nn.Module):
    """Stack of graph-convolution blocks, each LayerNorm + ReLU, with
    residual connections; message passing follows the exported adjacency
    (parent, children, self) under symmetric degree normalization."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        d = cfg.enc_embed
        self.embed = nn.Embedding(VOCAB_SIZE, d, padding_idx=PAD_ID)
        self.blocks = nn.ModuleList(nn.Linear(d, d) for _ in range(cfg.gcn_layers))
        self.norms = nn.ModuleList(nn.LayerNorm(d) for _ in range(cfg.gcn_layers))
        self.dropout = nn.Dropout(cfg.dropout)

    def forward(self, batch):
        x = self.embed(batch.src)
        for block, norm in zip(self.blocks, self.norms):
            message = torch.bmm(batch.adjacency, block(x))
            x = x + self.dropout(F.relu(norm(message)))
        return x


class LSTMEncoder(nn.Module):
    """Recurrent encoder without attention; initial states are learned."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        d = cfg.enc_embed
        self.embed = nn.Embedding(VOCAB_SIZE, d, padding_idx=PAD_ID)
        self.lstm = nn.LSTM(d, d, num_layers=cfg.lstm_layers, batch_first=True)
        self.h0 = nn.Parameter(torch.zeros(cfg.lstm_layers, 1, d))
        self.c0 = nn.Parameter(torch.zeros(cfg.lstm_layers, 1, d))
        self.dropout = nn.Dropout(cfg.dropout)

    def forward(self, batch):
        x = self.dropout(self.embed(batch.src))
        b = x.size(0)
        state = (self.h0.expand(-1, b, -1).contiguous(), self.c0.expand(-1, b, -1).contiguous())
        packed = nn.utils.rnn.pack_padded_sequence(
            x, batch.lengths.cpu(), batch_first=True, enforce_sorted=False
        )
        out, _ = self.lstm(packed, state)
        out, _ = nn.utils.rnn.pad_packed_sequence(
            out, batch_first=True, total_length=x.size(1)
        )
        return out


class DecoderLayer(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        d = cfg.dec_embed
        self.self_attn = nn.MultiheadAttention(
            d, cfg.heads, dropout=cfg.dropout, batch_first=True
        )
        self.cross_attn = nn.MultiheadAttention(
            d,
            cfg.heads,
            dropout=cfg.dropout,
            batch_first=True,
            kdim=cfg.enc_embed,
            vdim=cfg.enc_embed,
        )
        self.ff = nn.Sequential(
            nn.Linear(d, cfg.ff_size),
            nn.ReLU(),
            nn.Dropout(cfg.dropout),
            nn.Linear(cfg.ff_size, d),
        )
        self.norm1 = nn.LayerNorm(d)
        self.norm2 = nn.LayerNorm(d)
        self.norm3 = nn.LayerNorm(d)
        self.dropout = nn.Dropout(cfg.dropout)

    def forward(self, x, memory, causal_mask, memory_pad):
        attn, _ = self.self_attn(
            x, x, x, attn_mask=causal_mask, need_weights=False
        )
        x = self.norm1(x + self.dropout(attn))
        attn, _ = self.cross_attn(
            x, memory, memory, key_padding_mask=memory_pad, need_weights=False
        )
        x = self.norm2(x + self.dropout(attn))
        return self.norm3(x + self.dropout(self.ff(x)))


class Decoder(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        d = cfg.dec_embed
        self.embed = nn.Embedding(VOCAB_SIZE, d, padding_idx=PAD_ID)
        self.scale = math.sqrt(d)
        self.register_buffer("positions", sinusoidal_positions(cfg.max_len, d))
        self.dropout = nn.Dropout(cfg.dropout)
        self.layers = nn.ModuleList(DecoderLayer(cfg) for _ in range(cfg.dec_layers))
        self.out = nn.Linear(d, VOCAB_SIZE)

    def forward(self, dec_in, memory, memory_pad):
        t = dec_in.size(1)
        causal = torch.triu(
            torch.ones(t, t, dtype=torch.bool, device=dec_in.device), diagonal=1
        )
        x = self.embed(dec_in) * self.scale + self.positions[:t]
        x = self.dropout(x)
        for layer in self.layers:
            x = layer(x, memory, causal, memory_pad)
        return self.out(x)


class Seq2Seq(nn.Module):
    def __init__(self, cfg: ModelConfig, encoder: nn.Module):
        super().__init__()
        self.cfg = cfg
        self.encoder = encoder
        self.decoder = Decoder(cfg)

    def forward(self, batch):
        memory = self.encoder(batch)
        return self.decoder(batch.dec_in, memory, batch.src_pad)

    def loss(self, batch):
        logits = self.forward(batch)
        return F.cross_entropy(
            logits.reshape(-1, VOCAB_SIZE),
            batch.dec_out.reshape(-1),
            ignore_index=PAD_ID,
        )

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())


def build_model(cfg: ModelConfig) -> Seq2Seq:
    cfg.validate()
    if cfg.encoder_kind == "transformer_abs":
        encoder = TransformerEncoder(cfg, tree_positions=False)
    elif cfg.encoder_kind == "transformer_tree":
        encoder = TransformerEncoder(cfg, tree_positions=True)
    elif cfg.encoder_kind == "gcn":
        encoder = GCNEncoder(cfg)
    else:
        encoder = LSTMEncoder(cfg)
    return Seq2Seq(cfg, encoder)

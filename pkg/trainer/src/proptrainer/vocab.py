"""Shared token vocabulary for formulas and assignment outputs."""

PAD = "<pad>"
BOS = "<s>"
EOS = "</s>"

TOKENS = (
    PAD,
    BOS,
    EOS,
    "!",
    "&",
    "|",
    "<->",
    "xor",
    "a",
    "b",
    "c",
    "d",
    "e",
    "0",
    "1",
)

TOKEN_TO_ID = {tok: i for i, tok in enumerate(TOKENS)}
PAD_ID = TOKEN_TO_ID[PAD]
BOS_ID = TOKEN_TO_ID[BOS]
EOS_ID = TOKEN_TO_ID[EOS]
VOCAB_SIZE = len(TOKENS)


def encode(tokens) -> list[int]:
    return [TOKEN_TO_ID[tok] for tok in tokens]


def decode(ids) -> list[str]:
    """Surface tokens before the first end marker, specials stripped."""
    out = []
    for i in ids:
        if i == EOS_ID:
            break
        if i in (PAD_ID, BOS_ID):
            continue
        out.append(TOKENS[i])
    return out

"""Sequences, FASTA I/O and translation through the standard genetic code."""

from __future__ import annotations

import enum
import io
import itertools
from dataclasses import dataclass
from typing import Iterable, TextIO

from .errors import BadCodon, EmptyInput, IllegalCharacter, KindMismatch, MissingHeader, TooShort

NUCLEOTIDES = "ACGT"
AMINO_ACIDS = "ACDEFGHIKLMNPQRSTVWY"
STOP = "*"

DNA_ALPHABET = frozenset(NUCLEOTIDES)
PROTEIN_ALPHABET = frozenset(AMINO_ACIDS + STOP)


class Kind(str, enum.Enum):
    DNA = "DNA"
    PROTEIN = "Protein"


@dataclass(frozen=True)
class Sequence:
    id: str
    residues: str
    kind: Kind = Kind.DNA

    def __post_init__(self):
        if "\n" in self.id or "\r" in self.id:
            raise ValueError("sequence id must not contain newlines")
        if not self.residues:
            raise ValueError("sequence must be non-empty")
        alphabet = DNA_ALPHABET if self.kind is Kind.DNA else PROTEIN_ALPHABET
        bad = set(self.residues) - alphabet
        if bad:
            raise ValueError(f"residues {sorted(bad)} not valid for {self.kind.value}")

    def __len__(self):
        return len(self.residues)


# Standard code (NCBI translation table 1), TCAG ordering.
_BASES = "TCAG"
_AAS = "FFLLSSSSYY**CC*WLLLLPPPPHHQQRRRRIIIMTTTTNNKKSSRRVVVVAAAADDEEGGGG"
GENETIC_CODE: dict[str, str] = {
    "".join(c): aa for c, aa in zip(itertools.product(_BASES, repeat=3), _AAS)
}

THREE_LETTER = {
    "A": "Ala", "R": "Arg", "N": "Asn", "D": "Asp", "C": "Cys",
    "Q": "Gln", "E": "Glu", "G": "Gly", "H": "His", "I": "Ile",
    "L": "Leu", "K": "Lys", "M": "Met", "F": "Phe", "P": "Pro",
    "S": "Ser", "T": "Thr", "W": "Trp", "Y": "Tyr", "V": "Val",
    STOP: "Stop",
}


def infer_kind(residues: str) -> Kind:
    return Kind.DNA if set(residues) <= DNA_ALPHABET else Kind.PROTEIN


def parse_fasta(text: str | TextIO) -> list[Sequence]:
    """Parse a FASTA document into sequences.

    Residues are uppercased and whitespace inside sequence lines is dropped.
    A record whose residues are all A/C/G/T is DNA, otherwise protein.
    """
    if not isinstance(text, str):
        text = text.read()
    records: list[tuple[str, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith(">"):
            records.append((line[1:], []))
            continue
        chunk = "".join(line.split()).upper()
        if not chunk:
            continue
        if not records:
            raise MissingHeader(f"sequence data before any '>' header at line {lineno}")
        for ch in chunk:
            if ch not in DNA_ALPHABET and ch not in PROTEIN_ALPHABET:
                raise IllegalCharacter(ch, lineno)
        records[-1][1].append(chunk)
    if not records:
        raise EmptyInput("no FASTA records found")
    out = []
    for header, chunks in records:
        residues = "".join(chunks)
        if not residues:
            raise EmptyInput(f"record {header!r} has no sequence")
        out.append(Sequence(header, residues, infer_kind(residues)))
    return out


def read_fasta(path) -> list[Sequence]:
    with open(path, encoding="utf-8") as fh:
        return parse_fasta(fh)


def write_fasta(seqs: Iterable[Sequence], width: int = 60) -> str:
    if width < 1:
        raise ValueError("width must be >= 1")
    buf = io.StringIO()
    for seq in seqs:
        buf.write(f">{seq.id}\n")
        for i in range(0, len(seq.residues), width):
            buf.write(seq.residues[i:i + width])
            buf.write("\n")
    return buf.getvalue()


def codon_to_aa(codon: str) -> str:
    try:
        return GENETIC_CODE[codon]
    except (KeyError, TypeError):
        raise BadCodon(f"not a DNA codon: {codon!r}") from None


def translate(dna: Sequence, mode: str = "full") -> Sequence:
    """Translate reading frame 1 of a DNA sequence.

    ``full`` emits one residue per whole codon, stops included as ``*``.
    ``cds`` stops after the first stop codon (which is kept). Trailing
    bases beyond the last whole codon are ignored.
    """
    if dna.kind is not Kind.DNA:
        raise KindMismatch(f"{dna.id}: translate needs a DNA sequence")
    if mode not in ("full", "cds"):
        raise ValueError(f"unknown translation mode {mode!r}")
    s = dna.residues
    if len(s) < 3:
        raise TooShort(f"{dna.id}: {len(s)} nt is shorter than one codon")
    aas = []
    for i in range(0, len(s) - 2, 3):
        aa = GENETIC_CODE[s[i:i + 3]]
        aas.append(aa)
        if aa == STOP and mode == "cds":
            break
    return Sequence(dna.id, "".join(aas), Kind.PROTEIN)

"""Mutation calling from a reference/person alignment and the malignancy verdict."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

from .align import GAP, DEFAULT_SCORING, Alignment, Scoring, global_align, is_identical
from .errors import OutOfRange, SameBase
from .seqcore import NUCLEOTIDES, STOP, THREE_LETTER, Kind, Sequence, codon_to_aa, translate

PURINES = frozenset("AG")
PYRIMIDINES = frozenset("CT")


class MutationKind(str, enum.Enum):
    SUBSTITUTION = "Substitution"
    INSERTION = "Insertion"
    DELETION = "Deletion"


class Structural(str, enum.Enum):
    SUBSTITUTION = "Substitution"
    FRAMESHIFT = "Frameshift"
    IN_FRAME_INDEL = "InFrameIndel"


class Verdict(str, enum.Enum):
    NORMAL = "Normal"
    SILENT = "Silent"
    MALIGNANT = "Malignant"


@dataclass(frozen=True)
class DnaMutation:
    """A DNA-level difference, positioned on the 1-based reference CDS.

    An insertion at ``nt_position`` p sits immediately before reference
    base p, so p may be one past the end of the reference.
    """

    nt_position: int
    kind: MutationKind
    ref_bases: str = ""
    alt_bases: str = ""

    def __post_init__(self):
        if self.kind is MutationKind.SUBSTITUTION:
            ok = len(self.ref_bases) == len(self.alt_bases) >= 1
        elif self.kind is MutationKind.INSERTION:
            ok = self.ref_bases == "" and self.alt_bases != ""
        else:
            ok = self.alt_bases == "" and self.ref_bases != ""
        if not ok or self.nt_position < 1:
            raise ValueError(f"inconsistent mutation {self!r}")

    @property
    def length(self) -> int:
        return max(len(self.ref_bases), len(self.alt_bases))


@dataclass(frozen=True)
class MutationRecord:
    nt_position: int
    codon_number: int
    wt_codon: str
    mutant_codon: str
    wt_aa: str
    mutant_aa: str
    event: str
    structural: Structural
    subst_class: str
    stop_at: Optional[int] = None
    gene_location: str = ""
    cancer: str = ""

    def to_json(self) -> dict:
        return {
            "mutation_position": self.nt_position,
            "codon_number": self.codon_number,
            "wt_codon": self.wt_codon,
            "mutant": self.mutant_codon,
            "wt_aa": self.wt_aa,
            "mutant_aa": self.mutant_aa,
            "event": self.event,
            "structural": self.structural.value,
            "type": self.subst_class,
            "stop_at": self.stop_at,
            "gene_location": self.gene_location,
            "cancer": self.cancer,
        }


@dataclass(frozen=True)
class Diagnosis:
    verdict: Verdict
    dna_mutations: tuple = ()
    records: tuple = ()
    dna_alignment: Optional[Alignment] = None
    protein_alignment: Optional[Alignment] = None

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "dna_mutations": [
                {
                    "nt_position": m.nt_position,
                    "kind": m.kind.value,
                    "ref_bases": m.ref_bases,
                    "alt_bases": m.alt_bases,
                }
                for m in self.dna_mutations
            ],
            "mutations": [r.to_json() for r in self.records],
        }
        for name, al in (("dna_alignment", self.dna_alignment),
                         ("protein_alignment", self.protein_alignment)):
            out[name] = None if al is None else {
                "reference": al.a_gapped, "person": al.b_gapped, "score": al.score,
            }
        return out


def classify_event(ref_base: str, alt_base: str) -> str:
    if ref_base not in NUCLEOTIDES or alt_base not in NUCLEOTIDES:
        raise ValueError(f"not nucleotides: {ref_base!r}, {alt_base!r}")
    if ref_base == alt_base:
        raise SameBase(f"{ref_base}>{alt_base} is not a substitution")
    pair = {ref_base, alt_base}
    return "Ts" if pair <= PURINES or pair <= PYRIMIDINES else "Tv"


def call_dna_mutations(al: Alignment) -> list[DnaMutation]:
    """Walk the alignment columns and report differences on reference coordinates.

    Row ``a`` is the reference and row ``b`` the person. Each mismatch column
    is a single-base substitution; a maximal run of gaps in either row is one
    indel.
    """
    muts = []
    ref_pos = 0  # reference bases consumed so far
    run_kind = None
    run_start = 0
    run_bases = []

    def flush():
        nonlocal run_kind, run_bases
        if run_kind is MutationKind.DELETION:
            muts.append(DnaMutation(run_start, run_kind, ref_bases="".join(run_bases)))
        elif run_kind is MutationKind.INSERTION:
            muts.append(DnaMutation(run_start, run_kind, alt_bases="".join(run_bases)))
        run_kind, run_bases = None, []

    for x, y in al.columns():
        if y == GAP:
            if run_kind is not MutationKind.DELETION:
                flush()
                run_kind, run_start = MutationKind.DELETION, ref_pos + 1
            run_bases.append(x)
            ref_pos += 1
        elif x == GAP:
            if run_kind is not MutationKind.INSERTION:
                flush()
                run_kind, run_start = MutationKind.INSERTION, ref_pos + 1
            run_bases.append(y)
        else:
            flush()
            ref_pos += 1
            if x != y:
                muts.append(DnaMutation(ref_pos, MutationKind.SUBSTITUTION, x, y))
    flush()
    return muts


def apply_mutations(ref: str, muts) -> str:
    """Rebuild the person sequence from the reference and a list of mutations."""
    out = []
    pos = 0
    for m in sorted(muts, key=lambda m: (m.nt_position, m.kind is not MutationKind.INSERTION)):
        start = m.nt_position - 1
        out.append(ref[pos:start])
        out.append(m.alt_bases)
        pos = start + len(m.ref_bases)
    out.append(ref[pos:])
    return "".join(out)


def stop_scan(mutant_cds: Sequence | str, from_codon: int) -> Optional[int]:
    """Codon number of the first stop at or after ``from_codon``, or None."""
    s = mutant_cds if isinstance(mutant_cds, str) else mutant_cds.residues
    for k in range(max(from_codon, 1), len(s) // 3 + 1):
        if codon_to_aa(s[3 * k - 3:3 * k]) == STOP:
            return k
    return None


def codon_effect(ref_cds: Sequence, mut: DnaMutation) -> MutationRecord:
    ref = ref_cds.residues
    n_codons = len(ref) // 3
    codon_number = math.ceil(mut.nt_position / 3)
    if mut.nt_position + len(mut.ref_bases) - 1 > len(ref) or codon_number > n_codons:
        raise OutOfRange(f"mutation at nt {mut.nt_position} lies beyond the {len(ref)}-nt CDS")
    start = 3 * (codon_number - 1)
    wt_codon = ref[start:start + 3]
    wt_aa = THREE_LETTER[codon_to_aa(wt_codon)]

    if mut.kind is MutationKind.SUBSTITUTION:
        if len(mut.ref_bases) != 1:
            raise ValueError("substitutions are called one base at a time")
        offset = mut.nt_position - 1 - start
        mutant_codon = wt_codon[:offset] + mut.alt_bases + wt_codon[offset + 1:]
        return MutationRecord(
            nt_position=mut.nt_position,
            codon_number=codon_number,
            wt_codon=wt_codon,
            mutant_codon=mutant_codon,
            wt_aa=wt_aa,
            mutant_aa=THREE_LETTER[codon_to_aa(mutant_codon)],
            event=f"{mut.ref_bases}>{mut.alt_bases}",
            structural=Structural.SUBSTITUTION,
            subst_class=classify_event(mut.ref_bases, mut.alt_bases),
        )

    n = mut.length
    frameshift = n % 3 != 0
    if mut.kind is MutationKind.INSERTION:
        descriptor, event = f"ins{n}", "ins"
    else:
        descriptor, event = f"del{n}", "del"
    mutant = apply_mutations(ref, [mut])
    return MutationRecord(
        nt_position=mut.nt_position,
        codon_number=codon_number,
        wt_codon=wt_codon,
        mutant_codon=descriptor,
        wt_aa=wt_aa,
        mutant_aa="Fs" if frameshift else "inf",
        event=event,
        structural=Structural.FRAMESHIFT if frameshift else Structural.IN_FRAME_INDEL,
        subst_class="NA",
        stop_at=stop_scan(mutant, codon_number),
    )


def _affects_protein(rec: MutationRecord) -> bool:
    return rec.structural is not Structural.SUBSTITUTION or rec.wt_aa != rec.mutant_aa


def diagnose(reference: Sequence, person: Sequence, scoring: Scoring = DEFAULT_SCORING) -> Diagnosis:
    """Normal, Silent or Malignant, following the DNA-then-protein comparison."""
    if reference.kind is not Kind.DNA or person.kind is not Kind.DNA:
        raise ValueError("diagnose needs two DNA coding sequences")
    dna_al = global_align(reference, person, scoring)
    if is_identical(dna_al):
        return Diagnosis(Verdict.NORMAL, dna_alignment=dna_al)
    muts = tuple(call_dna_mutations(dna_al))
    prot_al = global_align(translate(reference, "cds"), translate(person, "cds"), scoring)
    if is_identical(prot_al):
        return Diagnosis(Verdict.SILENT, muts, dna_alignment=dna_al, protein_alignment=prot_al)
    in_cds = [m for m in muts if m.nt_position <= len(reference)]
    records = [codon_effect(reference, m) for m in in_cds]
    affecting = [r for r in records if _affects_protein(r)]
    # Changes that only alter the protein jointly (several synonymous hits in
    # one codon) would otherwise leave a Malignant verdict with no records.
    return Diagnosis(Verdict.MALIGNANT, muts, tuple(affecting or records),
                     dna_alignment=dna_al, protein_alignment=prot_al)


def with_metadata(rec: MutationRecord, gene_location: str = "", cancer: str = "") -> MutationRecord:
    return replace(rec, gene_location=gene_location, cancer=cancer)

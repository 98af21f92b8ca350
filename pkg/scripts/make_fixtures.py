"""Regenerate the bundled synthetic TP53-like reference CDS and demo person files.

The sequence is NOT the real TP53 coding sequence. It is a seeded random
open reading frame of 393 sense codons plus a TGA stop (1182 nt, the length
of the human TP53 CDS) in which the codons named by the sample mutation
table are pinned, so every substitution row of the table is reproducible
under 1-based nucleotide coordinates. Codon 155 is pinned to ACC (Thr).
"""

import csv
import math
import pathlib

import numpy as np

from tp53nn.seqcore import GENETIC_CODE, Sequence, write_fasta

DATA = pathlib.Path(__file__).resolve().parents[1] / "src" / "tp53nn" / "data"
N_CODONS = 394
SEED = 53


def pinned_codons():
    pins = {1: "ATG", 155: "ACC", N_CODONS: "TGA"}
    with open(DATA / "mutation_sample.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            codon = math.ceil(int(row["mutation_position"]) / 3)
            assert pins.get(codon, row["wt_codon_2"]) == row["wt_codon_2"]
            pins[codon] = row["wt_codon_2"]
    return pins


def main():
    sense = sorted(c for c, aa in GENETIC_CODE.items() if aa != "*")
    rng = np.random.default_rng(SEED)
    pins = pinned_codons()
    codons = [pins.get(k) or sense[rng.integers(len(sense))] for k in range(1, N_CODONS + 1)]
    ref = "".join(codons)
    assert ref[462:465] == "ACC"
    person = ref[:462] + "C" + ref[463:]
    silent = ref[:464] + "T" + ref[465:]  # ACC -> ACT, still Thr
    (DATA / "tp53_reference_sample.fasta").write_text(
        write_fasta([Sequence("TP53_reference_sample synthetic CDS", ref)]))
    (DATA / "person_codon155.fasta").write_text(
        write_fasta([Sequence("person_codon155 ACC>CCC at nt 463", person)]))
    (DATA / "person_silent.fasta").write_text(
        write_fasta([Sequence("person_silent ACC>ACT at nt 465", silent)]))


if __name__ == "__main__":
    main()

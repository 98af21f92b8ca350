"""TP53 mutation detection and cancer-type classification with a back-propagation network."""

from .align import Alignment, Scoring, global_align, is_identical
from .bpnn import Network, TrainConfig, TrainReport, forward, init_network, train, train_step
from .dataset import Encoder, Record, decode_label, encode, fit_encoder, load_records
from .mutcall import Diagnosis, DnaMutation, MutationRecord, Verdict, diagnose
from .seqcore import Kind, Sequence, codon_to_aa, parse_fasta, translate, write_fasta

__version__ = "0.1.0"

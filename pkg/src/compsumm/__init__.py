"""Compressive summarization with rule-proposed spans gated by plausibility and salience."""
from .errors import ContractError, MalformedTreeError, TrainingDivergedError, ValidationError
from .oracle import (ExtractionOracle, LabeledSpan, ParallelPair, SpanLabel, compression_oracle,
                     greedy_extraction_oracle, plausibility_labels, salience_labels)
from .pipeline import (CompressiveSummary, PipelineConfig, compression_ratio, licensed_spans,
                       rejection_rate, select_sentences, summarize, truncate_document)
from .porter import porter_stem
from .rouge import RougeConfig, RougeScore, rouge_l, rouge_n, rouge_suite
from .rules import CandidateSpan, RuleId, apply_deletions, propose_spans
from .scorer import (LinearScorer, ScoreTable, TrainConfig, featurize_sentence, featurize_span,
                     gradient, load_external_scores, predict, train)
from .treebank import (Constituent, DocumentRecord, ParseTree, SentenceRecord, Token,
                       constituents_of, parse_bracketed, render_bracketed)

__version__ = "0.1.0"

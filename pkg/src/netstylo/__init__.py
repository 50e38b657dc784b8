"""netstylo: authorship attribution from the dynamics of word co-occurrence
networks.

Books are preprocessed into lemma streams, cut into fixed-size windows, and
each window becomes a small directed co-occurrence network.  Twelve global
topology measurements per window form per-book time series whose first four
moments are the classification attributes.
"""

from .classify import ClassifierSpec, EvaluationReport, evaluate, stratified_kfold
from .corpus import (LemmaRules, LexiconTagger, RawDocument, StopwordList, Token,
                     TokenStream, ingest_pretagged, load_stopwords,
                     preprocess_document, remove_stopwords, tag_and_lemmatize,
                     tokenize)
from .featurespace import (AttributeSubset, FeatureMatrix, assemble,
                           greedy_backward_select, minmax_normalize,
                           moment_slice, variance_sweep, variance_threshold)
from .graphmetrics import NetworkMetrics, UndirectedView, compute_all
from .manifold import (IsomapModel, PcaModel, classical_mds, export_2d,
                       isomap_embed, parameter_sweep, pca_fit_transform)
from .netbuild import (CooccurrenceNetwork, Partition, build_network,
                       choose_window, partition_stream)
from .pipeline import PipelineConfig, PipelineRun, parse_config, run_experiment
from .serieslab import (MetricSeries, MomentVector, StationarityReport, adf_test,
                        autocorrelation, build_series, kpss_test, moments,
                        stationarity_battery)

__version__ = "0.1.0"

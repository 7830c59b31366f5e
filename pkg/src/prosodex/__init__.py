"""Rhythm analysis of text through phone-level rhyme timelines.

The pipeline lays each document out on an integer time axis (one unit per
phone), marks rhyme signals anchored by punctuation, clusters them into
homogeneity windows, aggregates window statistics into feature vectors,
and evaluates poetry-versus-prose classifiers plus similarity-network
figures on top of them.
"""

__version__ = "0.1.0"

"""Bayesian hypothesis tests with cake priors."""

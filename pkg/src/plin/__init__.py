"""Exact computer algebra for infinitesimal Poisson geometry along Poisson submanifolds."""

"""Shared components and utilities for randlattice services."""

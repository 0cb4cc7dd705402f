"""Artifact writers for CSV and JSON run output."""

from .artifact_writer import ArtifactWriter, read_csv_tables

__all__ = ['ArtifactWriter', 'read_csv_tables']

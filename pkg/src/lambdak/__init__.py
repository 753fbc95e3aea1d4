"""Exact equivariant K-theory localization engine."""

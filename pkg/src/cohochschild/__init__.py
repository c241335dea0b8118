"""Exact Hochschild and coHochschild homology of small dg (co)algebras."""

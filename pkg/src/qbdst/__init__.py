"""Primal-dual 2*H_k approximation for directed Steiner tree on quasi-bipartite
graphs, with self-checking dual certificates."""

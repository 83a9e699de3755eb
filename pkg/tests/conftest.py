from random import Random

from mvowf.graphs import SimpleGraph


def random_graph(n: int, rng: Random, p: float = 0.5) -> SimpleGraph:
    edges = [
        (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p
    ]
    return SimpleGraph.from_edges(n, edges)


def relabel(g: SimpleGraph, perm) -> SimpleGraph:
    return SimpleGraph.from_edges(g.n_vertices, [(perm[u], perm[v]) for u, v in g.edges])


def shuffled_copy(g: SimpleGraph, rng: Random) -> tuple[SimpleGraph, list[int]]:
    perm = list(range(g.n_vertices))
    rng.shuffle(perm)
    return relabel(g, perm), perm

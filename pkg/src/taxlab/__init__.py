"""taxlab: a desk-scale laboratory for truthful combinatorial-auction
mechanisms — complexity measurement over finite valuation catalogs, menu
reconstruction in three query models, promise-disjointness protocols, menu
verification probes, and solution-concept transformations, all in exact
rational arithmetic."""

__version__ = "0.1.0"

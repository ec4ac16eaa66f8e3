"""Services package: the number theory, lattice, isogeny and hidden shift modules
plus the orchestration services built on them."""

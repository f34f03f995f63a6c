# Services Layer - Ensembles, special functions, densities and expansions

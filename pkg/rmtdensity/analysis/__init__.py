# Analysis Layer - Error-scaling reports, oracle checks and figure datasets

# Hamming CS - Shared Module
# Common code shared across all packages: config, logging, base schemas

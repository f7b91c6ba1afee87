# SPPS test suite

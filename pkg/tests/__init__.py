# corrwitness test suite

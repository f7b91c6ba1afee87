# Utils module tests

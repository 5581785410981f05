# String analysis package

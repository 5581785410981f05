# URL model package

# Static/dynamic comparison package

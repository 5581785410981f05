# SIR package

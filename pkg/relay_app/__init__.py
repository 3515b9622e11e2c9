# Relay simulator application package

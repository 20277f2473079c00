# DYAD - exact solver for bilinear systems of equations

"""Physical constants shared across the device models (SI units)."""

EPS0 = 8.854e-12        # vacuum permittivity (F/m)
Q_E = 1.602e-19         # elementary charge (C)
K_B = 1.381e-23         # Boltzmann constant (J/K)
T_ROOM = 300.0          # simulation temperature (K)

V_THERMAL = K_B * T_ROOM / Q_E   # thermal voltage kT/q at 300 K (V)

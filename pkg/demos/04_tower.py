"""Where obstructions to extending an orientation up the tower
MX_1 -> MX_2 -> ... -> MU can live, for several localizations."""

from fgl_lab import EnLocal, KnLocal, PLocal, Rational, obstruction_stages, tower_report

for spec in (Rational(), PLocal(2), EnLocal(3, 1), KnLocal(2, 2)):
    print(f"{str(spec):8}", obstruction_stages(spec, 100))

print()
print(tower_report(EnLocal(3, 1), 10, format="text"))

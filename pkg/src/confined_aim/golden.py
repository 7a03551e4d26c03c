"""Published reference values for the confined Coulomb problem.

Values are kept as decimal strings exactly as printed (digit groups joined),
so the number of printed digits, and hence the comparison tolerance of one
unit in the last place, can be recovered from the string itself.

Energies are at A = 2 (Rydbergs); radii are in Bohr radii.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

A_DONOR = "2"


@dataclass(frozen=True)
class EnergyRow:
    R: str
    a: str
    E: str
    axis: str
    exact: bool = False


@dataclass(frozen=True)
class CriticalRow:
    l: int
    n: int
    r_c: str


@dataclass(frozen=True)
class ExactRow:
    """A special radius: ``A R = c (d + sign sqrt(q))`` when ``closed`` is set.

    Rows without a closed form carry only the printed value of ``A R``.
    """

    n: int
    l: int
    m: int
    closed: tuple | None
    printed: str
    E_over_A2: str

    def closed_form(self) -> str:
        if self.closed is None:
            return ""
        c, d, sign, q = self.closed
        if q == 0:
            return str(c * d)
        return f"{c}({d}{'+' if sign > 0 else '-'}sqrt({q}))"


def ulp(printed: str) -> Decimal:
    """One unit in the last printed digit of a decimal string."""
    d = Decimal(printed)
    return Decimal(1).scaleb(d.as_tuple().exponent)


def _r(R, a, E, axis, exact=False):
    return EnergyRow(R, a, E, axis, exact)


# ground state (1s), A = 2
TABLE2 = (
    _r("0.1", "30.62655836555364042852", "937.986077318663675020", "imaginary"),
    _r("0.2", "14.90435230641164788003", "222.139717673638207696", "imaginary"),
    _r("0.3", "9.65322613176772744950", "93.184774751043322516", "imaginary"),
    _r("0.4", "7.01908958547066506848", "49.267618608862752786", "imaginary"),
    _r("0.5", "5.43101648503303286457", "29.495940060700559289", "imaginary"),
    _r("0.6", "4.36525092203102298622", "19.055415612292696322", "imaginary"),
    _r("0.7", "3.59720061360254468531", "12.939852254502523992", "imaginary"),
    _r("0.8", "3.01442537841274960839", "9.086760362018848673", "imaginary"),
    _r("0.9", "2.55428641159918422480", "6.524379072480237168", "imaginary"),
    _r("1.0", "2.17898640018870412738", "4.747981732207327454", "imaginary"),
    _r("1.2", "1.59330788933196414270", "2.538630030207478496", "imaginary"),
    _r("1.4", "1.13763360917677905696", "1.294210228728584474", "imaginary"),
    _r("1.6", "0.73663058942207546649", "0.542624625272314320", "imaginary"),
    _r("1.8", "0.25517152188999072415", "0.065112505583654015", "imaginary"),
    _r("2.0", "0.5", "-0.25", "real", exact=True),
    _r("2.2", "0.68122444390542722915", "-0.464066742974258570", "real"),
    _r("2.4", "0.78281288587317251399", "-0.612796014289084615", "real"),
    _r("2.6", "0.84732318986827135552", "-0.717956588088542630", "real"),
    _r("2.8", "0.89069253587844113367", "-0.793333193469568146", "real"),
    _r("3.0", "0.92083363072104797435", "-0.847934575466907348", "real"),
    _r("3.2", "0.94223455502719141281", "-0.887805956687289402", "real"),
    _r("3.4", "0.95765089374931601763", "-0.917095234298863756", "real"),
    _r("3.6", "0.96886651941351939741", "-0.938702332440467559", "real"),
    _r("3.8", "0.97708075821092941885", "-0.954686808066044717", "real"),
    _r("4.0", "0.98312288354815749983", "-0.966530604156044052", "real"),
)

# 2p state (l = 1, n = 1), A = 2
TABLE3 = (
    _r("0.4", "10.81185679890724350822", "116.896247440076786588403", "imaginary"),
    _r("1", "4.05540092128037668383", "16.446276632321727964741", "imaginary"),
    _r("2", "1.77539786279376878065", "3.152037571212681836807", "imaginary"),
    _r("4", "0.53577436242126780133", "0.287054167427916019155", "imaginary"),
    _r("8", "0.45705594057219478244", "-0.208900132812333648630", "real"),
)

# critical cage radii, A = 2
TABLE4 = (
    CriticalRow(0, 1, "1.8352463302655"),
    CriticalRow(0, 2, "6.1523070402118"),
    CriticalRow(0, 3, "12.9374317368921"),
    CriticalRow(0, 4, "22.1900958517256"),
    CriticalRow(0, 5, "33.9102067841092"),
    CriticalRow(0, 6, "48.0977381378387"),
    CriticalRow(1, 1, "5.0883082272750"),
    CriticalRow(1, 2, "11.9096965680046"),
    CriticalRow(1, 3, "21.1744312282624"),
    CriticalRow(1, 4, "32.9001067818760"),
    CriticalRow(1, 5, "47.0906749290209"),
    CriticalRow(1, 6, "63.7474594844094"),
)

# special radii admitting closed-form solutions
TABLE1 = (
    ExactRow(1, 0, 0, (4, 1, 0, 0), "4", "-1/16"),
    ExactRow(1, 1, 0, (12, 1, 0, 0), "12", "-1/36"),
    ExactRow(1, 2, 0, (24, 1, 0, 0), "24", "-1/64"),
    ExactRow(1, 3, 0, (40, 1, 0, 0), "40", "-1/100"),
    ExactRow(2, 0, 0, (3, 3, -1, 3), "", "-1/36"),
    ExactRow(2, 0, 1, (3, 3, 1, 3), "", "-1/36"),
    ExactRow(2, 1, 0, (4, 5, -1, 5), "", "-1/64"),
    ExactRow(2, 1, 1, (4, 5, 1, 5), "", "-1/64"),
    ExactRow(2, 2, 0, (5, 7, -1, 7), "", "-1/100"),
    ExactRow(2, 2, 1, (5, 7, 1, 7), "", "-1/100"),
    ExactRow(2, 3, 0, (36, 1, 0, 0), "36", "-1/144"),
    ExactRow(2, 3, 1, (72, 1, 0, 0), "72", "-1/144"),
    ExactRow(3, 0, 0, None, "3.74329", "-1/64"),
    ExactRow(3, 0, 1, None, "13.2216", "-1/64"),
    ExactRow(3, 0, 2, None, "31.0351", "-1/64"),
)


def table(table_id: int):
    tables = {1: TABLE1, 2: TABLE2, 3: TABLE3, 4: TABLE4}
    if table_id not in tables:
        raise KeyError(f"no table {table_id}; choose 1, 2, 3 or 4")
    return tables[table_id]

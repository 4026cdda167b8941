LABELS = [
    "∅",
    "4(1,1)",
    "4(2)",
    "6(1,1)",
    "6(2)",
    "6(3)",
    "8(2,1,1)",
    "8(1,1)a",
    "8(1,1)b",
    "8(2)a",
    "8(2)b",
    "10(2,1,1)a",
    "10(2,1,1)b",
    "8(3)",
    "8(4)",
    "10(3,1,1)",
    "10(3,2)",
]

GAMMA_MAP = {
    "∅": 0,
    "4(1,1)": 0,
    "4(2)": 0,
    "6(1,1)": 0,
    "6(2)": 0,
    "6(3)": 0,
    "8(2,1,1)": 0,
    "8(1,1)a": 1,
    "8(1,1)b": 1,
    "8(2)a": 1,
    "8(2)b": 1,
    "10(2,1,1)a": 1,
    "10(2,1,1)b": 1,
    "8(3)": 2,
    "8(4)": 2,
    "10(3,1,1)": 2,
    "10(3,2)": 2,
}

# a/b siblings share a forgetful map and differ by the attached double cover
SIBLING_MAP = {
    "8(1,1)a": "8(1,1)b",
    "8(1,1)b": "8(1,1)a",
    "8(2)a": "8(2)b",
    "8(2)b": "8(2)a",
    "10(2,1,1)a": "10(2,1,1)b",
    "10(2,1,1)b": "10(2,1,1)a",
}

EMPTY_CLI = "empty"

EXIT_CODES = {
    "ok": 0,
    "failed": 1,
    "parse": 2,
    "io": 3,
    "unsupported": 4,
}

INFINITY = "infinity"


def label_to_cli(label: str) -> str:
    if label == "∅":
        return EMPTY_CLI
    return label.replace("(", "_").replace(",", "_").replace(")", "")


def cli_to_label(text: str) -> str:
    """Inverse of label_to_cli; also accepts the display form."""
    if text in LABELS:
        return text
    if text in (EMPTY_CLI, "0", "_"):
        return "∅"
    for label in LABELS:
        if label_to_cli(label) == text:
            return label
    raise KeyError(text)

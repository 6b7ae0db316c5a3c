"""Named example networks and distributions shipped with the package."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .netmodel import Network, parse_network
from .setfn import JointPMF, parse_pmf

DATA = Path(str(resources.files("netmatch") / "data"))


def read(name: str) -> str:
    return (DATA / name).read_text()


def butterfly() -> Network:
    return parse_network(read("butterfly.net"))


def noisy_butterfly(p: float = 0.11) -> Network:
    """Butterfly whose two feeder edges into m1 have capacity h(p)."""
    text = read("noisy_butterfly.net").replace("h(0.11)", f"h({p!r})")
    return parse_network(text)


def broken_butterfly() -> Network:
    return parse_network(read("broken_butterfly.net"))


def interference_example() -> Network:
    return parse_network(read("interference.net"))


def ma_example() -> Network:
    return parse_network(read("ma_example.net"))


def uniform_bits() -> JointPMF:
    return parse_pmf(read("uniform_bits.pmf"))

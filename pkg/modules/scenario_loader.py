"""
Scenario file loading

Scenario files are INI-style with four sections:

    [system]
    id = qubit-i
    seed = 7

    [coupling]
    observable = pauli-z        # a built-in name, a matrix file, or rows "1, 0; 0, -1"
    psi_i = 1, 1
    psi_f = 1, i
    g = 1e-3
    backend = exact

    [pointer]
    kind = gaussian             # or "tabulated" with table = <wavefunction dump>
    sigma = 1.0
    chirp = 0.5
    q0 = 0
    p0 = 0
    mass = 1.0
    potential = v.txt           # optional, one value per grid point

    [grid]
    n_points = 1024
    length = 80

Complex entries are written as a+bi. Relative paths resolve against the
directory of the scenario file. State vectors are normalized on load.
"""
import configparser
import re
from pathlib import Path
from typing import Optional, Union

import numpy as np
from loguru import logger
from pydantic import ValidationError

from models.scenario import Backend, GaussianRecipe, Scenario, TabulatedRecipe
from models.system import Observable
from modules.exceptions import ScenarioFileError
from modules.pointer_space import build_grid, load_wavefunction
from modules.system_algebra import NAMED_OBSERVABLES, make_observable, make_state, named_observable


_BARE_IMAGINARY = re.compile(r'(?<![0-9.])i')


def parse_complex(token: str) -> complex:
    """Parse "a+bi", "bi", "-i" or a plain real number"""
    text = token.strip().replace(" ", "").lower()
    if not text:
        raise ScenarioFileError(None, "empty complex entry")
    text = _BARE_IMAGINARY.sub("1i", text).replace("i", "j")
    try:
        return complex(text)
    except ValueError:
        raise ScenarioFileError(None, f"cannot parse complex entry {token!r}")


def parse_vector(text: str) -> np.ndarray:
    """Comma-separated complex entries"""
    return np.array([parse_complex(t) for t in text.split(",") if t.strip()], dtype=complex)


def parse_matrix(text: str) -> np.ndarray:
    """Rows separated by ';', entries by ','"""
    rows = [parse_vector(r) for r in text.split(";") if r.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ScenarioFileError(None, f"ragged or empty matrix {text!r}")
    return np.vstack(rows)


def load_matrix(path: Union[str, Path]) -> np.ndarray:
    """
    Read a matrix file: one row per line, entries separated by commas or
    whitespace, '#' starts a comment
    """
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise ScenarioFileError(str(path), str(e))
    rows = []
    for line in lines:
        content = line.split("#", 1)[0].strip()
        if content:
            rows.append(",".join(content.replace(",", " ").split()))
    try:
        return parse_matrix(";".join(rows))
    except ScenarioFileError as e:
        raise ScenarioFileError(str(path), str(e))


def _resolve(base_dir: Optional[Path], value: str) -> Path:
    path = Path(value)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    return path


def resolve_observable(spec: str, base_dir: Optional[Path] = None, dim: int = 2) -> Observable:
    """Built-in name, inline matrix rows, or a matrix file; dim sizes "identity" """
    text = spec.strip()
    if text.lower() in NAMED_OBSERVABLES or text.lower() == "identity":
        return named_observable(text, dim)
    if ";" in text:
        return make_observable(parse_matrix(text))
    return make_observable(load_matrix(_resolve(base_dir, text)))


def scenario_from_config(
    parser: configparser.ConfigParser,
    base_dir: Optional[Path] = None,
    source: Optional[str] = None
) -> Scenario:
    """
    Build a Scenario from parsed sections

    Raises:
        ScenarioFileError: for missing sections or keys and unparseable values
    """
    try:
        system = parser["system"] if parser.has_section("system") else {}
        coupling = parser["coupling"]
        pointer = parser["pointer"] if parser.has_section("pointer") else parser["DEFAULT"]
        grid_section = parser["grid"] if parser.has_section("grid") else pointer

        grid = build_grid(int(grid_section["n_points"]), float(grid_section["length"]))

        kind = pointer.get("kind", "gaussian").strip().lower()
        if kind == "gaussian":
            recipe = GaussianRecipe(
                sigma=float(pointer.get("sigma", "1.0")),
                chirp=float(pointer.get("chirp", "0.0")),
                q0=float(pointer.get("q0", "0.0")),
                p0=float(pointer.get("p0", "0.0")),
            )
        elif kind == "tabulated":
            table = _resolve(base_dir, pointer["table"])
            recipe = TabulatedRecipe(amplitudes=load_wavefunction(table, grid), source=str(table))
        else:
            raise ScenarioFileError(source, f"unknown pointer kind {kind!r}")

        potential = None
        if pointer.get("potential"):
            potential_path = _resolve(base_dir, pointer["potential"])
            try:
                potential = np.loadtxt(potential_path, ndmin=1)
            except (OSError, ValueError) as e:
                raise ScenarioFileError(str(potential_path), str(e))

        seed = system.get("seed")
        psi_i = make_state(parse_vector(coupling["psi_i"]))
        return Scenario(
            scenario_id=system.get("id", Path(source).stem if source else "0"),
            observable=resolve_observable(coupling["observable"], base_dir, psi_i.dim),
            psi_i=psi_i,
            psi_f=make_state(parse_vector(coupling["psi_f"])),
            g=float(coupling["g"]),
            mass=float(pointer.get("mass", "1.0")),
            pointer=recipe,
            grid=grid,
            backend=Backend(coupling.get("backend", "exact").strip()),
            seed=int(seed) if seed not in (None, "") else None,
            potential=potential,
        )
    except KeyError as e:
        raise ScenarioFileError(source, f"missing section or key {e}")
    except ValidationError as e:
        raise ScenarioFileError(source, f"invalid values: {e.errors()[0]['msg']}")
    except ValueError as e:
        raise ScenarioFileError(source, str(e))


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Read a scenario file

    Raises:
        ScenarioFileError: if the file is missing or malformed
    """
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        with open(path) as f:
            parser.read_file(f)
    except (OSError, configparser.Error) as e:
        raise ScenarioFileError(str(path), str(e))

    scenario = scenario_from_config(parser, path.parent, str(path))
    logger.debug(f"Loaded scenario {scenario.scenario_id} from {path}")
    return scenario

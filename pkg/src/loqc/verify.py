"""End-to-end verification of the gate library.

Truth tables, four-fold coincidence moment tables, Bell-state generation,
interior-state comparisons against the closed-form kets, dual-path
consistency between sequential evolution and the permanent oracle, and
beamsplitter-error sensitivity sweeps.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .elements import Circuit, compose_transfer_matrix
from .evolve import AmplitudeQuery, evolve, oracle_amplitude
from .fock import FockStateVector, inner_product, make_state
from .gates import (
    BASIS_INPUTS,
    CNOT_IMAGE,
    ETA2_BIASED,
    BiasedNsParameters,
    NsParameters,
    balanced_biased_parameters,
    biased_ns_amplitudes,
    build_biased_ns_circuit,
    build_cnot_circuit,
    build_ns_circuit,
    build_simplified_cnot,
    conditional_map_by_evolution,
    decode_logical,
    encode_logical,
    gate_by_name,
    logical_pair,
    ns_conditional_map,
    optimal_ns_parameters,
)
from .postselect import (
    DetectionPattern,
    coincidence_probability,
    condition,
    strip_empty_modes,
)

CNOT_SUCCESS = 1.0 / 16.0
SIMPLIFIED_SUCCESS = ETA2_BIASED**2

_QUBIT_LABELS = ("c_H", "c_V", "t_H", "t_V")

BELL_STATES = {
    "phi+": (1 / math.sqrt(2), 0.0, 0.0, 1 / math.sqrt(2)),
    "phi-": (1 / math.sqrt(2), 0.0, 0.0, -1 / math.sqrt(2)),
    "psi+": (0.0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0.0),
    "psi-": (0.0, 1 / math.sqrt(2), -1 / math.sqrt(2), 0.0),
}


def _as_circuit(gate: str | Circuit) -> Circuit:
    return gate_by_name(gate) if isinstance(gate, str) else gate


def coincidence_pattern(circuit: Circuit) -> DetectionPattern:
    """Four-fold coincidence: one photon on the control rail pair, one on
    the target rail pair, one at each NS herald; vacuum outputs are left
    unconstrained (with four photons in, they are forced empty anyway)."""
    c_pair = tuple(circuit.mode_index(l) for l in ("c_H", "c_V"))
    t_pair = tuple(circuit.mode_index(l) for l in ("t_H", "t_V"))
    a1 = circuit.mode_index("a1")
    a2 = circuit.mode_index("a2")
    return DetectionPattern(
        exact={a1: 1, a2: 1}, groups=((c_pair, 1), (t_pair, 1))
    )


def conditioned_logical_output(
    circuit: Circuit, pair, conditioning: str = "heralded"
) -> tuple[float, FockStateVector | None]:
    """Evolve an encoded qubit pair and condition on the detector outcome.

    Returns the success probability and the normalized conditional state
    over (c_H, c_V, t_H, t_V), or None when the probability vanishes.
    """
    state = encode_logical(pair, circuit)
    out = evolve(state, circuit)
    if conditioning == "heralded":
        if circuit.detection is None:
            raise ValueError("circuit has no heralding detection pattern")
        pattern = circuit.detection
    elif conditioning == "coincidence":
        pattern = coincidence_pattern(circuit)
    else:
        raise ValueError(f"unknown conditioning mode {conditioning!r}")
    outcome = condition(out, pattern)
    if outcome.normalized is None:
        return outcome.probability, None
    qubit_modes = {circuit.mode_index(l) for l in _QUBIT_LABELS}
    extra = tuple(
        i for i, m in enumerate(outcome.kept_modes) if m not in qubit_modes
    )
    state4 = outcome.normalized
    if extra:
        state4 = strip_empty_modes(state4, extra)
    return outcome.probability, state4


# ---------------------------------------------------------------------------
# truth table and moments


@dataclass
class GateReport:
    gate: str
    conditioning: str
    rows: list[dict]
    moments: dict[str, dict[str, float]]
    max_deviation: float
    checks: list[dict]
    passed: bool

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _expected_success(gate_name: str) -> tuple[float, float]:
    """(expected per-input success probability, tolerance)."""
    if gate_name == "cnot":
        return CNOT_SUCCESS, 1e-10
    if gate_name == "cnot-simplified":
        return SIMPLIFIED_SUCCESS, 1e-7
    raise ValueError(f"no truth table defined for gate {gate_name!r}")


def moment_table(gate: str | Circuit, input_label: str) -> dict[str, float]:
    """Four-fold coincidence probabilities for one basis input.

    Keys name the (control rail, target rail) detector pair: "HV" is the
    coincidence of c_H out, t_V out, a1 out and a2 out. Computed on the
    raw evolved output, with no conditioning.
    """
    circuit = _as_circuit(gate)
    out = evolve(encode_logical(logical_pair(input_label), circuit), circuit)
    a1 = circuit.mode_index("a1")
    a2 = circuit.mode_index("a2")
    table = {}
    for c_rail, t_rail in itertools.product("HV", repeat=2):
        quad = (
            circuit.mode_index(f"c_{c_rail}"),
            circuit.mode_index(f"t_{t_rail}"),
            a1,
            a2,
        )
        table[c_rail + t_rail] = coincidence_probability(out, quad)
    return table


def truth_table(gate: str, conditioning: str = "heralded") -> GateReport:
    """Evolve all four computational basis inputs and check the gate logic.

    Each row records the conditioned output's logical amplitudes, its
    success probability and the leakage outside the dual-rail subspace.
    The row is correct when the normalized output sits entirely on the
    image basis state (the sign of its amplitude is not observable).
    """
    circuit = _as_circuit(gate)
    expected_p, p_tol = _expected_success(gate)
    rows = []
    moments: dict[str, dict[str, float]] = {}
    map_dev = 0.0
    prob_dev = 0.0
    moment_dev = 0.0
    cross_max = 0.0
    for label in BASIS_INPUTS:
        image = CNOT_IMAGE[label]
        probability, state4 = conditioned_logical_output(
            circuit, logical_pair(label), conditioning
        )
        if state4 is None:
            amps, leakage, row_error = (0j, 0j, 0j, 0j), 0.0, 1.0
        else:
            amps, leakage = decode_logical(state4)
            row_error = 1.0 - abs(amps[BASIS_INPUTS.index(image)]) ** 2
        decoded = max(BASIS_INPUTS, key=lambda k: abs(amps[BASIS_INPUTS.index(k)]))
        table = moment_table(circuit, label)
        moments[label] = table
        for combo, value in table.items():
            if combo == image:
                moment_dev = max(moment_dev, abs(value - expected_p))
            else:
                cross_max = max(cross_max, value)
        map_dev = max(map_dev, row_error)
        prob_dev = max(prob_dev, abs(probability - expected_p))
        rows.append(
            {
                "input": label,
                "expected": image,
                "decoded": decoded,
                "conditioning": conditioning,
                "probability": probability,
                "expected_probability": expected_p,
                "leakage": leakage,
                "row_error": row_error,
                "amplitudes": {
                    k: amps[i] for i, k in enumerate(BASIS_INPUTS)
                },
            }
        )
    checks = [
        {
            "name": "logical map (1 - image weight)",
            "value": map_dev,
            "tolerance": 1e-10,
            "passed": map_dev < 1e-10,
        },
        {
            "name": "success probability deviation",
            "value": prob_dev,
            "tolerance": p_tol,
            "passed": prob_dev < p_tol,
        },
        {
            "name": "signal moment deviation",
            "value": moment_dev,
            "tolerance": 1e-10 if gate == "cnot" else 1e-7,
            "passed": moment_dev < (1e-10 if gate == "cnot" else 1e-7),
        },
        {
            "name": "cross moments",
            "value": cross_max,
            "tolerance": 1e-12,
            "passed": cross_max < 1e-12,
        },
    ]
    max_dev = max(map_dev, prob_dev, moment_dev, cross_max)
    return GateReport(
        gate=gate if isinstance(gate, str) else "custom",
        conditioning=conditioning,
        rows=rows,
        moments=moments,
        max_deviation=max_dev,
        checks=checks,
        passed=all(c["passed"] for c in checks),
    )


# ---------------------------------------------------------------------------
# Bell-state generation


def bell_test(gate: str = "cnot") -> dict:
    """Run the four superposition inputs and identify the Bell state each
    produces, together with the reduced single-qubit purity.

    The assignment (which input yields which Bell state) is derived from
    the evolution itself and reported; it is stable because the circuit
    is fixed.
    """
    circuit = _as_circuit(gate)
    entries = []
    for label in ("+H", "-H", "+V", "-V"):
        probability, state4 = conditioned_logical_output(
            circuit, logical_pair(label), "heralded"
        )
        amps, leakage = decode_logical(state4)
        fidelities = {
            name: abs(sum(b.conjugate() * a for b, a in zip(bell, amps))) ** 2
            for name, bell in BELL_STATES.items()
        }
        best = max(fidelities, key=fidelities.get)
        psi = np.array([[amps[0], amps[1]], [amps[2], amps[3]]])
        rho = psi @ psi.conj().T
        purity = float(np.real(np.trace(rho @ rho)))
        entries.append(
            {
                "input": label,
                "bell_state": best,
                "fidelity": fidelities[best],
                "purity": purity,
                "probability": probability,
                "leakage": leakage,
            }
        )
    worst_fidelity = min(e["fidelity"] for e in entries)
    worst_purity = max(abs(e["purity"] - 0.5) for e in entries)
    return {
        "gate": gate if isinstance(gate, str) else "custom",
        "entries": entries,
        "worst_fidelity": worst_fidelity,
        "worst_purity_deviation": worst_purity,
        "passed": worst_fidelity > 1.0 - 1e-10 and worst_purity < 1e-10,
    }


# ---------------------------------------------------------------------------
# interior states


def _reference_input_split(control: str, target_sign: float) -> FockStateVector:
    """Closed-form interior state after the input splitters, over
    (c_H, arm-1, arm-2, t''').

    For control H: (1/sqrt(2))|1001> + s*(1/2)(|1100> - |1010>).
    For control V: (1/2)(|0101> + |0011> + s*(|0200> - |0020>)).
    s = +1 for target H, -1 for target V.
    """
    s = target_sign
    if control == "H":
        return make_state(
            4,
            [
                ((1, 0, 0, 1), 1 / math.sqrt(2)),
                ((1, 1, 0, 0), s * 0.5),
                ((1, 0, 1, 0), -s * 0.5),
            ],
        )
    return make_state(
        4,
        [
            ((0, 1, 0, 1), 0.5),
            ((0, 0, 1, 1), 0.5),
            ((0, 2, 0, 0), s * 0.5),
            ((0, 0, 2, 0), -s * 0.5),
        ],
    )


def reference_interior_state(
    gate: str, cut: str, input_label: str
) -> FockStateVector:
    """Closed-form conditioned interior ket for a basis input at a cut."""
    control, target = input_label[0], input_label[1]
    sign = 1.0 if target == "H" else -1.0
    base = _reference_input_split(control, sign)
    if gate == "cnot":
        if cut == "x":
            return base
        if cut == "y":
            lams = ns_conditional_map(optimal_ns_parameters())
        else:
            raise ValueError(f"no closed-form state at cut {cut!r} for {gate}")
    elif gate == "cnot-simplified":
        if cut in ("y", "z"):
            lams = biased_ns_amplitudes(balanced_biased_parameters())
        else:
            raise ValueError(f"no closed-form state at cut {cut!r} for {gate}")
    else:
        raise ValueError(f"no interior states defined for gate {gate!r}")
    amps = {
        occ: amp * lams[occ[1]] * lams[occ[2]]
        for occ, amp in base.amplitudes.items()
    }
    return FockStateVector(4, base.total_photons, amps)


def intermediate_state_check(gate: str, input_label: str, cut: str) -> dict:
    """Compare the evolved, conditioned interior state against its
    closed form, up to a global phase.

    The evolution fixes the overall phase of each branch (a target-V
    photon picks up a sign at its first grey reflection) while the
    closed-form kets are written phase-free, so the comparison aligns
    the global phase first and reports it; it is always +1 or -1 here.
    """
    if input_label not in BASIS_INPUTS:
        raise ValueError(f"interior states are defined for {BASIS_INPUTS}")
    circuit = _as_circuit(gate)
    if cut not in circuit.cuts:
        raise ValueError(
            f"gate {gate!r} has no cut {cut!r}; available: "
            f"{sorted(circuit.cuts)}"
        )
    state = encode_logical(logical_pair(input_label), circuit)
    evolved = evolve(state, circuit, upto=circuit.cuts[cut])
    outcome = condition(evolved, circuit.detection)
    reference = reference_interior_state(gate, cut, input_label)
    overlap = inner_product(reference, outcome.reduced)
    phase = overlap.conjugate() / abs(overlap) if abs(overlap) > 1e-12 else 1.0
    aligned = phase * outcome.reduced
    keys = set(aligned.amplitudes) | set(reference.amplitudes)
    deviation = max(
        abs(aligned.amplitude(k) - reference.amplitude(k)) for k in keys
    )
    return {
        "gate": gate,
        "input": input_label,
        "cut": cut,
        "deviation": deviation,
        "global_phase": complex(phase),
        "conditioned_probability": outcome.probability,
        "passed": deviation < 1e-10,
    }


# ---------------------------------------------------------------------------
# dual-path consistency


def heisenberg_consistency(gate: str) -> float:
    """Maximum deviation between sequential evolution and the permanent
    oracle over every amplitude the gate's verification relies on."""
    circuit = _as_circuit(gate)
    transfer = compose_transfer_matrix(circuit)
    dev = 0.0
    if gate in ("ns", "ns-biased"):
        if gate == "ns":
            closed = ns_conditional_map(optimal_ns_parameters())
        else:
            closed = biased_ns_amplitudes(balanced_biased_parameters())
        evolved = conditional_map_by_evolution(circuit)
        for n in range(3):
            occ = [0] * circuit.n_modes
            occ[0] = n
            for mode, k in circuit.ancilla_prep.items():
                occ[mode] += k
            occ = tuple(occ)
            oracle = oracle_amplitude(AmplitudeQuery(transfer, occ, occ))
            dev = max(dev, abs(evolved[n] - closed[n]), abs(oracle - closed[n]))
        return dev
    a1 = circuit.mode_index("a1")
    a2 = circuit.mode_index("a2")
    for label in BASIS_INPUTS:
        pair = logical_pair(label)
        input_occ = next(iter(encode_logical(pair, circuit).amplitudes))
        table = moment_table(circuit, label)
        for c_rail, t_rail in itertools.product("HV", repeat=2):
            out_occ = [0] * circuit.n_modes
            out_occ[circuit.mode_index(f"c_{c_rail}")] = 1
            out_occ[circuit.mode_index(f"t_{t_rail}")] = 1
            out_occ[a1] = 1
            out_occ[a2] = 1
            amp = oracle_amplitude(
                AmplitudeQuery(transfer, input_occ, tuple(out_occ))
            )
            dev = max(dev, abs(abs(amp) ** 2 - table[c_rail + t_rail]))
    return dev


# ---------------------------------------------------------------------------
# sensitivity sweep


@dataclass
class SensitivityResult:
    gate: str
    model: str
    magnitude: float
    mode: str
    n_evaluations: int
    worst_error: float
    mean_error: float
    worst_input: str
    worst_assignment: dict[str, float]
    probability_min: float
    probability_max: float
    element_labels: list[str]
    records: list[dict]

    def to_dict(self, with_records: bool = False) -> dict:
        doc = dataclasses.asdict(self)
        if not with_records:
            del doc["records"]
        return doc


def _perturbed_circuit(
    base: Circuit, deltas: tuple[float, ...], model: str
) -> Circuit:
    elements = []
    for el, d in zip(base.elements, deltas):
        if model == "absolute":
            eta = el.reflectivity + d
        elif model == "relative":
            eta = el.reflectivity * (1.0 + d)
        else:
            raise ValueError(f"unknown perturbation model {model!r}")
        eta = min(max(eta, 0.0), 1.0)
        elements.append(dataclasses.replace(el, reflectivity=eta))
    return dataclasses.replace(base, elements=tuple(elements))


def sensitivity_sweep(
    gate: str = "cnot",
    model: str = "absolute",
    magnitude: float = 0.02,
    mode: str = "corners",
    samples: int = 100,
    seed: int = 0,
) -> SensitivityResult:
    """Perturb every beamsplitter reflectivity and measure the logical error.

    "corners" enumerates all +/-magnitude sign patterns over the gate's
    splitters; "random" draws ``samples`` uniform perturbation vectors
    from the seeded generator. The logical error of one run is
    1 - |<ideal|output>|^2 with the conditioned output renormalized, so a
    lower success probability is reported (probability range) but never
    counted as gate error. The worst case is taken over the four basis
    inputs and all perturbations.
    """
    base = _as_circuit(gate)
    if magnitude < 0.0:
        raise ValueError(f"magnitude must be >= 0, got {magnitude}")
    if model not in ("absolute", "relative"):
        raise ValueError(f"unknown perturbation model {model!r}")
    k = len(base.elements)
    labels = [el.label or f"element{j}" for j, el in enumerate(base.elements)]
    if mode == "corners":
        delta_vectors = itertools.product((-magnitude, +magnitude), repeat=k)
    elif mode == "random":
        rng = np.random.default_rng(seed)
        delta_vectors = (
            tuple(rng.uniform(-magnitude, magnitude, size=k)) for _ in range(samples)
        )
    else:
        raise ValueError(f"unknown sweep mode {mode!r}")
    pairs = {label: logical_pair(label) for label in BASIS_INPUTS}
    worst = -1.0
    worst_input = ""
    worst_assignment: dict[str, float] = {}
    total_error = 0.0
    count = 0
    p_min, p_max = math.inf, -math.inf
    records = []
    for deltas in delta_vectors:
        circuit = _perturbed_circuit(base, deltas, model)
        errors = {}
        run_p_min, run_p_max = math.inf, -math.inf
        for label, pair in pairs.items():
            probability, state4 = conditioned_logical_output(circuit, pair)
            if state4 is None:
                error = 1.0
            else:
                amps, _ = decode_logical(state4)
                image = CNOT_IMAGE[label]
                error = 1.0 - abs(amps[BASIS_INPUTS.index(image)]) ** 2
            errors[label] = error
            run_p_min = min(run_p_min, probability)
            run_p_max = max(run_p_max, probability)
        run_worst_input = max(errors, key=errors.get)
        run_worst = errors[run_worst_input]
        if run_worst > worst:
            worst = run_worst
            worst_input = run_worst_input
            worst_assignment = {
                lab: el.reflectivity
                for lab, el in zip(labels, circuit.elements)
            }
        total_error += run_worst
        count += 1
        p_min = min(p_min, run_p_min)
        p_max = max(p_max, run_p_max)
        records.append(
            {
                "etas": [el.reflectivity for el in circuit.elements],
                "errors": errors,
                "worst_error": run_worst,
                "probability_min": run_p_min,
                "probability_max": run_p_max,
            }
        )
    if count == 0:
        raise ValueError("sweep evaluated no perturbations")
    return SensitivityResult(
        gate=gate if isinstance(gate, str) else "custom",
        model=model,
        magnitude=magnitude,
        mode=mode,
        n_evaluations=count,
        worst_error=worst,
        mean_error=total_error / count,
        worst_input=worst_input,
        worst_assignment=worst_assignment,
        probability_min=p_min,
        probability_max=p_max,
        element_labels=labels,
        records=records,
    )

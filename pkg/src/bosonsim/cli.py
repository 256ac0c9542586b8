"""Command-line surface: deterministic data emission for every module.

Exit codes: 0 success, 2 validation/usage error, 3 convergence failure,
4 I/O error.  CSV output follows RFC 4180 with a header row; floats are
printed with 17 significant digits so they round-trip exactly.  JSON
output uses sorted keys.  Every subcommand accepts ``--selftest`` to run
its module's invariant checks.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import dynamics, models
from .errors import BosonSimError, ConvergenceError

_FLOAT = "{:.17g}"


def _fmt(x):
    if isinstance(x, float):
        return _FLOAT.format(x)
    if isinstance(x, complex):
        return _FLOAT.format(x.real) + ("+" if x.imag >= 0 else "-") + \
            _FLOAT.format(abs(x.imag)) + "j"
    return x


def emit_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    _write(path, buf.getvalue())


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def emit_json(path, data):
    _write(path, json.dumps(_jsonable(data), sort_keys=True, indent=2) + "\n")


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _load_model(path):
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BosonSimError(
                f"malformed JSON at line {exc.lineno}, column {exc.colno}: "
                f"{exc.msg}"
            ) from exc
    known = {
        "bose_hubbard": (models.BoseHubbardParams, models.build_bose_hubbard),
        "spin_boson": (models.SpinBosonParams, models.build_spin_boson),
        "holstein": (models.HolsteinParams, models.build_holstein),
    }
    kind = cfg.pop("model", None)
    if kind not in known:
        raise BosonSimError(f"unknown model {kind!r}; expected one of "
                            f"{sorted(known)}")
    cls, builder = known[kind]
    fields = {f.name for f in cls.__dataclass_fields__.values()}
    unknown = set(cfg) - fields
    if unknown:
        raise BosonSimError(f"unknown keys in model spec: {sorted(unknown)}")
    for key, val in cfg.items():
        if isinstance(val, list):
            cfg[key] = tuple(val)
    return builder(cls(**cfg))


def _parse_range(text):
    """'1..10' → ten integer-spaced floats; '0.5' → [0.5]; 'a,b,c' → list."""
    if ".." in text:
        lo, hi = text.split("..")
        lo, hi = float(lo), float(hi)
        n = int(round(hi - lo)) + 1
        return [lo + i for i in range(n)]
    if "," in text:
        return [float(v) for v in text.split(",")]
    return [float(text)]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_compile(args):
    if args.selftest:
        return _selftest("pauli", "encodings", "models")
    model = _load_model(args.model)
    _write(args.out, model.pauli.to_text())
    if args.circuits:
        gl = _first_order_circuit(model, args.dt)
        _write(args.circuits, gl.to_qasm())
    return 0


def _first_order_circuit(model, dt):
    glists = []
    n = model.layout.total_qubits
    for term in model.pauli.terms:
        c = term.coefficient.real
        if set(term.letters) == {"I"}:
            continue
        from .pauli import PauliTerm
        unit = PauliTerm(term.letters, 1.0)
        glists.append(dynamics.synthesize_pauli_exponential(unit, 2.0 * c * dt))
    gates = [g for gl in glists for g in gl.gates]
    phase = sum(gl.phase for gl in glists)
    return dynamics.GateList(n, tuple(gates), phase)


def cmd_evolve(args):
    if args.selftest:
        return _selftest("dynamics")
    model = _load_model(args.model)
    H = model.pauli_matrix()
    dim = H.shape[0]
    psi0 = np.zeros(dim, dtype=complex)
    psi0[args.initial_basis_state] = 1.0
    exact = dynamics.evolve_exact(H, psi0, args.t)
    from .pauli import PauliTerm
    terms = [t.coefficient.real * PauliTerm(t.letters, 1.0).to_matrix()
             for t in model.pauli.terms]
    approx = dynamics.trotter_evolve(terms, psi0, args.t, args.steps, args.order)
    emit_json(args.out, {
        "t": args.t,
        "steps": args.steps,
        "order": args.order,
        "error_2norm": float(np.linalg.norm(exact - approx)),
        "fidelity": float(abs(np.vdot(exact, approx)) ** 2),
    })
    return 0


def cmd_walk(args):
    if args.selftest:
        return _selftest("models")
    params = models.BoseHubbardParams(
        n_sites=args.sites, t=args.hop, U=args.U, V=args.V,
        mu=0.0, Nb=2)
    model = models.build_bose_hubbard(params)
    H = model.fock
    dims = model.layout.fock_dims
    psi0 = np.zeros(H.shape[0], dtype=complex)
    # two bosons on the central site
    occ = [0] * args.sites
    occ[args.sites // 2] = 2
    idx = 0
    for d, n in zip(dims, occ):
        idx = idx * d + n
    psi0[idx] = 1.0
    psi = dynamics.evolve_exact(H, psi0, args.t)
    ann = []
    for i in range(args.sites):
        b, _, _ = models.mode_matrices(dims[i] - 1)
        ann.append(models.embed_fock(b, dims, i))
    gamma, density = models.walk_observables(psi, ann)
    rows = [(p, q, gamma[p, q]) for p in range(args.sites)
            for q in range(args.sites)]
    emit_csv(args.out, ["p", "q", "Gamma"], rows)
    return 0


def cmd_lindblad(args):
    if args.selftest:
        return _selftest("open_systems")
    from . import open_systems
    d = args.cutoff + 1
    b, bd, n = models.mode_matrices(args.cutoff)
    H = args.omega * n
    spec = open_systems.LindbladSpec(H, args.gamma_dephasing,
                                     args.gamma_heating, b, n)
    L = open_systems.build_liouvillian(spec)
    rho0 = np.zeros((d, d), dtype=complex)
    rho0[args.initial_level, args.initial_level] = 1.0
    rows = []

    def record(tau, rho):
        rows.append((tau, float(np.real(np.trace(rho @ n))),
                     float(np.real(np.trace(rho))),
                     float(np.real(np.trace(rho @ rho)))))

    open_systems.propagate_lindblad(L, rho0, args.t, dt=args.dt, record=record)
    emit_csv(args.out, ["t[1/omega]", "mean_n", "trace", "purity"], rows)
    return 0


def cmd_pds(args):
    if args.selftest:
        return _selftest("ground_state")
    from . import ground_state
    gs = _parse_range(args.g)
    rows = []
    for g in gs:
        params = models.HolsteinParams(n_sites=3, v=args.hop, omega=args.omega,
                                       g=g, Nb=1, boundary="periodic")
        model = models.build_holstein(params)
        H = model.pauli_matrix()
        w, _ = ground_state.exact_diagonalize(H)
        phi = ground_state.holstein_trial_state(model.layout)
        mom = ground_state.moments(H, phi, 2 * args.max_k - 1)
        row = [g, float(w[0])]
        for K in range(1, args.max_k + 1):
            res = ground_state.pds(mom, K, allow_degenerate=True)
            row.append(res.lowest_root)
        rows.append(row)
    header = ["g", "E_ED"] + [f"E_PDS{K}" for K in range(1, args.max_k + 1)]
    emit_csv(args.out, header, rows)
    return 0


def cmd_downfold(args):
    if args.selftest:
        return _selftest("downfolding")
    from . import downfolding
    sp = downfolding.BosonFockSpace(3, 2)
    H = downfolding.bose_hubbard_fixed_n(
        sp, t=args.hop, U=args.U, V=args.V, mu=tuple(_parse_range(args.mu)))
    result = downfolding.nested_optimize(H, sp)
    w = np.linalg.eigvalsh(H)
    emit_json(args.out, {
        "energy": result["energy"],
        "exact_energy": float(w[0]),
        "H_eff_row_major": list(np.asarray(result["H_eff"]).reshape(-1)),
        "params": {
            "r1": result["params"].r1, "r2": result["params"].r2,
            "s1": result["params"].s1, "s2": result["params"].s2,
            "s3": result["params"].s3,
        },
        "iterations": [
            {"iteration": it, "abs_energy_error": err}
            for it, err in result["trace"]
        ],
    })
    if args.csv:
        emit_csv(args.csv, ["iteration", "abs_energy_error"], result["trace"])
    return 0


def cmd_trunc(args):
    if args.selftest:
        return _selftest("trunc_bounds")
    from . import trunc_bounds
    rows = []
    for t in _parse_range(args.t):
        inp = trunc_bounds.TruncationInput(
            lambda0=args.lambda0, chi=args.chi, t=t, eps=args.eps,
            n_modes=args.modes)
        lam, plan = trunc_bounds.hamiltonian_cutoff(inp)
        rows.append((t, args.eps, args.modes, plan.delta_lambda,
                     plan.steps, lam))
    emit_csv(args.out, ["t[1/omega]", "eps", "N", "dLambda", "s", "Lambda~"],
             rows)
    return 0


def cmd_blockenc(args):
    if args.selftest:
        return _selftest("block_encoding")
    from . import block_encoding
    enc = block_encoding.boson_block_encode(args.cutoff, args.xi)
    emit_json(args.out, {
        "Lambda": enc.capital_lambda,
        "Xi": enc.capital_xi,
        "measured_error": enc.measured_error,
        "error_bound": enc.error_bound,
        "gate_cost_bitops": enc.gate_cost(),
    })
    return 0


def cmd_prep(args):
    if args.selftest:
        return _selftest("state_prep")
    from . import state_prep
    c = np.array([complex(v) for v in args.c.split(",")])
    c = c / np.linalg.norm(c)
    plan = state_prep.plan_prep(c, args.scheme)
    targets = [np.eye(len(c))[k] for k in range(len(c))]
    sim = state_prep.simulate_prep(plan, targets)
    emit_json(args.out, {
        "scheme": plan.scheme,
        "coefficients": [complex(v) for v in c],
        "x": list(map(float, plan.x)),
        "y": [complex(v) for v in plan.y],
        "p_success": plan.p_success,
        "amplification_steps": plan.amplification_steps,
        "simulated_probability": sim["probability"],
        "fidelity": sim["fidelity"],
    })
    return 0


def cmd_wegner(args):
    if args.selftest:
        return _selftest("flows")
    from . import flows
    rng = np.random.default_rng(args.seed)
    A = rng.normal(size=(args.dim, args.dim))
    H0 = (A + A.T) / 2.0
    ds = 0.1 / max(float(np.linalg.norm(H0)) ** 2, 1e-12)
    traj = flows.wegner_flow(H0, ds=ds, s_max=args.s_max)
    rows = []
    for st in traj:
        rows.append([st.s, st.off_diagonal_norm]
                    + [float(np.real(v)) for v in np.diag(st.H)])
    header = ["s", "offdiag_norm"] + [f"d{i}" for i in range(args.dim)]
    emit_csv(args.out, header, rows)
    return 0


def cmd_xy(args):
    if args.selftest:
        return _selftest("flows")
    from . import flows
    spec = flows.xy_spectrum(args.n, args.j, args.gamma, args.lam)
    rows = list(zip(spec["k"], spec["eps_k"], spec["delta_k"], spec["E_k"]))
    emit_csv(args.out, ["k[1/a]", "eps_k", "delta_k", "E_k[J]"], rows)
    return 0


# ---------------------------------------------------------------------------
# self-tests
# ---------------------------------------------------------------------------


def _selftest(*module_names):
    failures = []
    for name in module_names:
        try:
            _SELFTESTS[name]()
        except Exception as exc:  # report, keep going
            failures.append(f"{name}: {exc}")
    for line in failures:
        print("selftest FAILED:", line, file=sys.stderr)
    return 1 if failures else 0


def _st_pauli():
    from .pauli import PauliSum, PauliTerm, mul
    a = PauliTerm("XY", 1.0)
    b = PauliTerm("YX", 1.0)
    assert mul(a, b).letters == "ZZ"
    s = PauliSum.from_term("XY") + PauliSum.from_term("YX")
    assert np.allclose(s.to_matrix(), a.to_matrix() + b.to_matrix())
    assert PauliSum.from_text(s.to_text()).terms == s.terms


def _st_encodings():
    from .encodings import boson_ops_binary, boson_ops_unary
    for ops in (boson_ops_unary(3), boson_ops_binary(2)):
        bdag = ops["creation"].to_matrix()
        ann = ops["annihilation"].to_matrix()
        n = ops["number"].to_matrix()
        assert np.allclose(bdag, ann.conj().T)
        assert np.allclose(n, n.conj().T)


def _st_models():
    params = models.SpinBosonParams(delta=1.0, epsilon=0.5, omegas=(1.0,),
                                    couplings=(0.2,), cutoffs=(3,))
    m = models.build_spin_boson(params)
    assert m.identification_defect() < 1e-10


def _st_dynamics():
    from .pauli import PauliTerm
    term = PauliTerm("XY", 1.0)
    gl = dynamics.synthesize_pauli_exponential(term, 0.37)
    target = dynamics.expm_hermitian(term.to_matrix(), -0.5j * 0.37)
    assert np.max(np.abs(gl.unitary() - target)) < 1e-12


def _st_open_systems():
    from . import open_systems
    b, bd, n = models.mode_matrices(3)
    spec = open_systems.LindbladSpec(1.0 * n, 0.05, 0.02, b, n)
    L = open_systems.build_liouvillian(spec)
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = 1.0
    out = open_systems.propagate_lindblad(L, rho, 0.5, dt=1e-3)
    assert abs(np.trace(out) - 1.0) < 1e-8


def _st_ground_state():
    from . import ground_state
    H = np.diag([0.0, 1.0, 3.0])
    phi = np.array([0.8, 0.6, 0.0])
    mom = ground_state.moments(H, phi, 3)
    res = ground_state.pds(mom, 2)
    assert abs(res.lowest_root) < 1e-8


def _st_downfolding():
    from . import downfolding
    sp = downfolding.BosonFockSpace(3, 2)
    H = downfolding.bose_hubbard_fixed_n(sp, 1.0, 0.5, 1.0, (-1.0, 0.0, 1.0))
    out = downfolding.nested_optimize(H, sp)
    w = np.linalg.eigvalsh(H)
    assert abs(out["energy"] - w[0]) < 1e-6


def _st_trunc_bounds():
    from . import trunc_bounds
    inp = trunc_bounds.TruncationInput(lambda0=1, chi=2.0, t=1.0, eps=1e-2)
    lam, plan = trunc_bounds.hamiltonian_cutoff(inp)
    assert abs(sum(plan.durations) - 1.0) < 1e-12
    recheck = plan.recompute_total_bound_log()
    for name, slot in plan.budget.items():
        assert abs(recheck[name] - slot["total_log_bound"]) < 1e-12


def _st_block_encoding():
    from . import block_encoding
    enc = block_encoding.boson_block_encode(8, 256)
    assert enc.measured_error <= enc.error_bound + 1e-15


def _st_state_prep():
    from . import state_prep
    c = np.array([math.sqrt(1 / 3.0), math.sqrt(2 / 3.0)])
    plan = state_prep.plan_prep(c, "B")
    sim = state_prep.simulate_prep(plan, [np.eye(2)[0], np.eye(2)[1]])
    assert sim["fidelity"] > 1 - 1e-10
    assert abs(sim["probability"] - plan.p_success) < 1e-10


def _st_flows():
    from . import flows
    sp = flows.xy_spectrum(6, 1.0, 0.5, 1.0)
    bdg = flows.xy_bdg_spectrum(6, 1.0, 0.5, 1.0)
    assert np.max(np.abs(np.sort(sp["E_k"]) - bdg)) < 1e-10


_SELFTESTS = {
    "pauli": _st_pauli,
    "encodings": _st_encodings,
    "models": _st_models,
    "dynamics": _st_dynamics,
    "open_systems": _st_open_systems,
    "ground_state": _st_ground_state,
    "downfolding": _st_downfolding,
    "trunc_bounds": _st_trunc_bounds,
    "block_encoding": _st_block_encoding,
    "state_prep": _st_state_prep,
    "flows": _st_flows,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="bosonsim",
        description="Bosonic simulation workbench: encodings, dynamics, "
                    "bounds, and downfolding.")
    sub = p.add_subparsers(dest="command")

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--out", default="-", help="output path (default stdout)")
        sp.add_argument("--selftest", action="store_true",
                        help="run module invariant checks and exit")
        sp.add_argument("--seed", type=int, default=0)
        return sp

    sp = add("compile", cmd_compile, "compile a model to a Pauli-sum text file")
    sp.add_argument("--model", help="model JSON path")
    sp.add_argument("--circuits", help="also write a first-order step as QASM")
    sp.add_argument("--dt", type=float, default=0.1)

    sp = add("evolve", cmd_evolve, "Trotter vs exact evolution report")
    sp.add_argument("--model", help="model JSON path")
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--steps", type=int, default=64)
    sp.add_argument("--order", type=int, default=2)
    sp.add_argument("--initial-basis-state", type=int, default=0)

    sp = add("walk", cmd_walk, "two-boson walk pair correlations")
    sp.add_argument("--sites", type=int, default=5)
    sp.add_argument("--hop", type=float, default=1.0)
    sp.add_argument("--U", type=float, default=1.0)
    sp.add_argument("--V", type=float, default=0.0)
    sp.add_argument("--t", type=float, default=1.0)

    sp = add("lindblad", cmd_lindblad, "single-mode open-system time series")
    sp.add_argument("--cutoff", type=int, default=3)
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--gamma-dephasing", type=float, default=0.0)
    sp.add_argument("--gamma-heating", type=float, default=0.0)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--initial-level", type=int, default=1)

    sp = add("pds", cmd_pds, "moment-method sweep on the 3-site Holstein model")
    sp.add_argument("--g", default="0,0.5,1.0,1.5,2.0")
    sp.add_argument("--hop", type=float, default=1.0)
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--max-k", type=int, default=5)

    sp = add("downfold", cmd_downfold, "nested ansatz optimization report")
    sp.add_argument("--hop", type=float, default=1.0)
    sp.add_argument("--U", type=float, default=0.5)
    sp.add_argument("--V", type=float, default=1.0)
    sp.add_argument("--mu", default="-1,0,1")
    sp.add_argument("--csv", help="also write per-iteration error CSV")

    sp = add("trunc", cmd_trunc, "truncation-cutoff calculator sweep")
    sp.add_argument("--lambda0", type=int, default=1)
    sp.add_argument("--chi", type=float, default=2.0)
    sp.add_argument("--t", default="1..10")
    sp.add_argument("--eps", type=float, default=1e-3)
    sp.add_argument("--modes", type=int, default=1)

    sp = add("blockenc", cmd_blockenc, "creation-operator block encoding report")
    sp.add_argument("--cutoff", type=int, default=8, help="Λ (power of 2)")
    sp.add_argument("--xi", type=int, default=256, help="Ξ (power of 2)")

    sp = add("prep", cmd_prep, "state-preparation plan and simulation")
    sp.add_argument("--c", default="0.5773502691896258,0.816496580927726")
    sp.add_argument("--scheme", choices=("A", "B"), default="A")

    sp = add("wegner", cmd_wegner, "diagonalizing flow trajectory")
    sp.add_argument("--dim", type=int, default=6)
    sp.add_argument("--s-max", type=float, default=500.0)

    sp = add("xy", cmd_xy, "XY-chain single-particle spectrum")
    sp.add_argument("--n", type=int, default=6)
    sp.add_argument("--j", type=float, default=1.0)
    sp.add_argument("--gamma", type=float, default=0.5)
    sp.add_argument("--lam", type=float, default=1.0)

    return p


def run(argv) -> int:
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if not hasattr(args, "fn"):
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.fn(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (BosonSimError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

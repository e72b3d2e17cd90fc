"""Batch experiment runner: the ``nlg`` command.

Subcommands take JSON files in the documented schemas and print CSV (or
a single scalar) to stdout with full %.12g precision and the literal
``inf`` for divergent energies.  Every subcommand is deterministic given
its flags and seed: identical invocations produce byte-identical output.
``NLG_THREADS`` is accepted to cap parallelism; the current
implementation is serial, which satisfies any cap.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .core import (DiscreteArrangement, EnemyList, HostilityWeights, Interval,
                   FULL_LINE, PiecewiseAffine1D, SchemaError, StepFunction1D,
                   validate_and_build)
from .constants import gamma_limit_constant, spherical_moment, staircase_constant
from .functional1d import EnergyParams, local_energy, step_energy
from .multidim import Box, RadialTent, energy_by_montecarlo, energy_by_sectioning
from .rearrange import (hostile_gap_counts, hostility_gap, monotone_rearrangement,
                        monotone_rearrangement_step, reduce_arrangement,
                        total_hostility, vertical_segmentation)


def _fmt(x: float) -> str:
    return "%.12g" % x


def _load(path: str):
    with open(path) as fh:
        return validate_and_build(json.load(fh))


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _domain_from_args(args, u) -> Interval:
    if getattr(args, "domain", None) is not None:
        return Interval(args.domain[0], args.domain[1])
    if isinstance(u, StepFunction1D):
        return u.domain
    return FULL_LINE


def cmd_constants(args) -> int:
    c = staircase_constant(args.p)
    g = spherical_moment(args.d, args.p)
    lim = gamma_limit_constant(args.d, args.p)
    print("d,p,C_p,G_dp,gamma_limit_constant")
    print(",".join([str(args.d), _fmt(args.p), _fmt(c.value), _fmt(g.value),
                    _fmt(lim.value)]))
    return 0


def cmd_lambda(args) -> int:
    u = _load(args.input)
    params = EnergyParams(args.delta, args.p)
    if isinstance(u, PiecewiseAffine1D):
        if not args.segment:
            print("error: piecewise affine input requires --segment", file=sys.stderr)
            return 2
        u = vertical_segmentation(u, args.delta)
    elif not isinstance(u, StepFunction1D):
        print(f"error: expected a step or piecewise affine function, got "
              f"{type(u).__name__}", file=sys.stderr)
        return 2
    domain = _domain_from_args(args, u)
    print(_fmt(step_energy(u, domain, params)))
    return 0


def cmd_segment(args) -> int:
    u = _load(args.input)
    if not isinstance(u, PiecewiseAffine1D):
        print(f"error: segment expects a piecewise affine function, got "
              f"{type(u).__name__}", file=sys.stderr)
        return 2
    step = vertical_segmentation(u, args.delta)
    _write(json.dumps(step.to_json()) + "\n", args.output)
    return 0


def cmd_rearrange(args) -> int:
    u = _load(args.input)
    if isinstance(u, DiscreteArrangement):
        out = monotone_rearrangement(u)
    elif isinstance(u, StepFunction1D):
        domain = _domain_from_args(args, u)
        if not domain.bounded:
            print("error: rearranging a step function needs a bounded --domain",
                  file=sys.stderr)
            return 2
        out = monotone_rearrangement_step(u, domain)
    else:
        print(f"error: cannot rearrange a {type(u).__name__}", file=sys.stderr)
        return 2
    _write(json.dumps(out.to_json()) + "\n", args.output)
    return 0


def cmd_hostility(args) -> int:
    u = _load(args.arrangement)
    h = _load(args.weights)
    e = _load(args.enemies)
    if not isinstance(u, DiscreteArrangement) or not isinstance(h, HostilityWeights) \
            or not isinstance(e, EnemyList):
        print("error: hostility expects an arrangement, weights, and an enemy list",
              file=sys.stderr)
        return 2
    print(_fmt(total_hostility(h, e, u)))
    return 0


def _random_nonincreasing(rng, length: int) -> HostilityWeights:
    return HostilityWeights(tuple(np.sort(rng.random(length))[::-1]))


def cmd_fuzz(args) -> int:
    """Rearrangement property suite: sorting minimizes, gaps match, M and R commute."""
    rng = np.random.default_rng(args.seed)
    enemies = EnemyList.band_complement(args.k)
    checked = 0
    violations = 0
    tol = 1e-12
    for n in range(1, args.n_max + 1):
        h_batch = np.stack([np.sort(rng.random(n))[::-1] for _ in range(args.trials)])
        for flat in np.ndindex(*([args.species_max] * n)):
            u = DiscreteArrangement(tuple(int(v) for v in flat))
            mu = monotone_rearrangement(u)
            cu = hostile_gap_counts(enemies, u)
            cm = hostile_gap_counts(enemies, mu)
            hu = h_batch @ cu
            hm = h_batch @ cm
            checked += args.trials
            violations += int(np.sum(hu < hm - tol))
            if n >= 2:
                # gap formula against the two-evaluation difference
                weights = HostilityWeights(tuple(h_batch[0]))
                ru, _ = reduce_arrangement(u)
                direct = total_hostility(weights, enemies, u) \
                    - total_hostility(weights, enemies, ru)
                gap = hostility_gap(weights, enemies, u)
                checked += 1
                if not math.isclose(gap, direct, rel_tol=1e-12, abs_tol=1e-12):
                    violations += 1
                # commutation of rearrangement and reduction
                checked += 1
                if monotone_rearrangement(ru) != reduce_arrangement(mu)[0]:
                    violations += 1
    print("checked,violations")
    print(f"{checked},{violations}")
    return 0 if violations == 0 else 1


_TENT = PiecewiseAffine1D(((0.0, 0.0), (1.0, 1.0), (2.0, 0.0)), compact_support=True)
_RAMP = PiecewiseAffine1D(((0.0, 0.0), (1.0, 1.0)), compact_support=False)


def _recovery_shape(name: str) -> PiecewiseAffine1D:
    if name == "tent":
        return _TENT
    if name == "ramp":
        return _RAMP
    raise SchemaError(f"unknown shape {name!r}")


def cmd_converge_recovery(args) -> int:
    u = _recovery_shape(args.shape)
    limit_scale = local_energy(u, args.p)
    rows = []
    delta = args.delta_start
    for _ in range(args.steps):
        params = EnergyParams(delta, args.p)
        step = vertical_segmentation(u, delta)
        domain = FULL_LINE if u.compact_support else u.support
        lam = step_energy(step, domain, params)
        limit = (2.0 / args.p) * staircase_constant(args.p).value * limit_scale
        rows.append((delta, lam, limit))
        delta *= args.delta_factor
    print("delta,lambda,limit,ratio")
    for delta, lam, limit in rows:
        print(",".join([_fmt(delta), _fmt(lam), _fmt(limit), _fmt(lam / limit)]))
    if len(rows) >= 2:
        # Richardson extrapolation assuming error linear in delta
        f = args.delta_factor
        lam_ext = (rows[-1][1] - f * rows[-2][1]) / (1.0 - f)
        limit = rows[-1][2]
        print(",".join([_fmt(0.0), _fmt(lam_ext), _fmt(limit), _fmt(lam_ext / limit)]))
    return 0


def cmd_converge_sectioning(args) -> int:
    if args.d != 2:
        print("error: only --d 2 is supported", file=sys.stderr)
        return 2
    if args.shape != "radial-tent":
        print(f"error: unknown shape {args.shape!r}", file=sys.stderr)
        return 2
    u = RadialTent((0.0, 0.0), 1.0, 1.0)
    box = u.support_box()
    limit = gamma_limit_constant(2, args.p).value * u.local_energy(args.p)
    print("delta,sectioning_estimate,mc_estimate,mc_stderr,limit")
    for delta in args.delta:
        params = EnergyParams(delta, args.p)
        sect, _ = energy_by_sectioning(u, params, args.dirs, args.offsets)
        mc, stderr = energy_by_montecarlo(u, params, box, args.mc_samples, args.seed)
        print(",".join([_fmt(delta), _fmt(sect), _fmt(mc), _fmt(stderr), _fmt(limit)]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlg",
        description="threshold-type non-local energies: exact evaluation, "
                    "rearrangement tools, and convergence experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="limit constants as a CSV row")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--d", type=int, default=1)
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser("lambda", help="exact energy of a step function")
    p.add_argument("--input", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--domain", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--segment", action="store_true",
                   help="vertically segment a piecewise affine input first")
    p.set_defaults(fn=cmd_lambda)

    p = sub.add_parser("segment", help="vertical segmentation of a piecewise "
                                       "affine function, as step-function JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_segment)

    p = sub.add_parser("rearrange", help="monotone rearrangement of an arrangement "
                                         "or step function")
    p.add_argument("--input", required=True)
    p.add_argument("--domain", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--output")
    p.set_defaults(fn=cmd_rearrange)

    p = sub.add_parser("hostility", help="total hostility of an arrangement")
    p.add_argument("--arrangement", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--enemies", required=True)
    p.set_defaults(fn=cmd_hostility)

    p = sub.add_parser("fuzz", help="rearrangement property suite")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--species-max", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_fuzz)

    p = sub.add_parser("converge-recovery", help="segmented recovery family "
                                                 "energies along a delta schedule")
    p.add_argument("--shape", choices=["tent", "ramp"], required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--delta-start", type=float, required=True)
    p.add_argument("--delta-factor", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(fn=cmd_converge_recovery)

    p = sub.add_parser("converge-sectioning", help="d=2 sectioning vs Monte Carlo")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--shape", default="radial-tent")
    p.add_argument("--delta", type=float, nargs="+", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--dirs", type=int, default=48)
    p.add_argument("--offsets", type=int, default=192)
    p.add_argument("--mc-samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_converge_sectioning)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: divergences, centroids, projections, sphere intersection.

Results go to stdout as JSON (default) or CSV with numeric fields printed to
17 significant digits.  Exit codes: 0 success, 1 domain/validation error,
2 numeric non-convergence.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import centroids, divergences, spheres
from .centroids import CccpConfig, WeightedParamSet
from .divergences import CurvedModel, circle_model, ellipse_model
from .generators import (make_alpha_generator, make_awq_lifted, make_burg,
                         make_extended_kl, make_logdet, make_quadratic,
                         make_shannon_simplex, make_gaussian_cumulant)
from .numerics import AmbiguityError, ConvergenceError, DomainError, SpdMatrix
from .representational import alpha_divergence


def _fmt(x):
    return format(float(x), ".17g")


def _jsonable(obj):
    """Recursively render floats as 17-significant-digit literals."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_jsonable(v)}"
                               for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_jsonable(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return json.dumps(obj)


def _emit(result, fmt):
    if fmt == "json":
        sys.stdout.write(_jsonable(result) + "\n")
        return
    # CSV: one row per flattened (key, value...) entry
    out = csv.writer(sys.stdout, lineterminator="\n")
    for key, val in result.items():
        if isinstance(val, (list, tuple, np.ndarray)):
            for i, row in enumerate(val):
                if isinstance(row, (list, tuple, np.ndarray)):
                    out.writerow([f"{key}[{i}]"] + [_fmt(x) for x in row])
                else:
                    out.writerow([f"{key}[{i}]", _fmt(row)])
        elif isinstance(val, (float, int, np.floating, np.integer)):
            out.writerow([key, _fmt(val)])
        else:
            out.writerow([key, val])


def _parse_vector(text):
    try:
        return np.array([float(tok) for tok in text.split(",")], dtype=float)
    except ValueError as exc:
        raise DomainError(f"malformed vector {text!r}") from exc


_GENERATORS = {
    "quadratic": lambda m, args: make_quadratic(SpdMatrix(np.eye(m))),
    "extended-kl": lambda m, args: make_extended_kl(m),
    "burg": lambda m, args: make_burg(m),
    "shannon-simplex": lambda m, args: make_shannon_simplex(m + 1),
    "alpha": lambda m, args: make_alpha_generator(args.alpha, m),
    "awq": lambda m, args: make_awq_lifted(make_burg(m // 2), args.awq_alpha,
                                           args.awq_beta),
    "logdet": lambda m, args: make_logdet(_logdet_order(m)),
    "gaussian": lambda m, args: make_gaussian_cumulant(_gaussian_order(m)),
}


def _logdet_order(packed_len):
    d = int(round((math.sqrt(8 * packed_len + 1) - 1) / 2))
    if d * (d + 1) // 2 != packed_len:
        raise DomainError(f"{packed_len} entries do not pack a symmetric matrix")
    return d


def _gaussian_order(packed_len):
    # packed length is d + d(d+1)/2
    for d in range(1, 64):
        if d + d * (d + 1) // 2 == packed_len:
            return d
    raise DomainError(f"{packed_len} entries do not pack a Gaussian parameter")


def _make_generator(name, m, args):
    if name not in _GENERATORS:
        raise DomainError(f"unknown generator {name!r}")
    return _GENERATORS[name](m, args)


def load_points(path) -> WeightedParamSet:
    """Read a weighted point set from CSV (header w,x1,...) or a JSON array."""
    with open(path) as fh:
        text = fh.read()
    if not text.strip():
        raise DomainError(f"empty input file {path}")
    weights, points = [], []
    if text.lstrip().startswith("["):
        for row in json.loads(text):
            weights.append(float(row["weight"]))
            points.append(np.asarray(row["point"], dtype=float).ravel())
    else:
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] and rows[0][0].strip() in ("w", "weight"):
            rows = rows[1:]
        width = None
        for row in rows:
            if not row:
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DomainError("ragged CSV rows")
            try:
                vals = [float(tok) for tok in row]
            except ValueError as exc:
                raise DomainError(f"malformed CSV row {row}") from exc
            if not all(math.isfinite(v) for v in vals):
                raise DomainError(f"non-finite value in row {row}")
            weights.append(vals[0])
            points.append(np.array(vals[1:]))
    if not points:
        raise DomainError(f"no points in {path}")
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        raise DomainError("weights must be strictly positive")
    total = float(w.sum())
    if abs(total - 1.0) > 1e-9:
        print(f"warning: weights sum to {total}; normalizing", file=sys.stderr)
        w = w / total
    return WeightedParamSet(points, w)


def _point_set(args):
    if getattr(args, "points_file", None):
        return load_points(args.points_file)
    if not args.points:
        raise DomainError("need --points or --points-file")
    pts = [np.array([v]) for v in _parse_vector(args.points)]
    if args.weights:
        w = _parse_vector(args.weights)
    else:
        w = np.full(len(pts), 1.0 / len(pts))
    total = float(w.sum())
    if abs(total - 1.0) > 1e-9:
        print(f"warning: weights sum to {total}; normalizing", file=sys.stderr)
        w = w / total
    return WeightedParamSet(pts, w)


def _curved_model(args):
    if args.model == "circle":
        return circle_model()
    if args.model.startswith("ellipse:"):
        a, b = (float(t) for t in args.model.split(":")[1].split(","))
        return ellipse_model(a, b)
    raise DomainError(f"unknown model {args.model!r}")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_div(args):
    left = _parse_vector(args.left)
    right = _parse_vector(args.right)
    if left.size != right.size:
        raise DomainError("dimension mismatch between --left and --right")
    if args.generator is None:
        if args.alpha is None:
            raise DomainError("need --generator or --alpha")
        value = alpha_divergence(args.alpha, left, right)
    else:
        g = _make_generator(args.generator, left.size, args)
        if args.symmetrized:
            value = divergences.symmetrized(g, left, right)
        elif args.awq_alpha is not None and args.generator != "awq":
            value = divergences.awq_divergence(g, args.awq_alpha,
                                               args.awq_beta, left, right)
        else:
            value = divergences.bregman(g, left, right)
    return {"value": value}


def _cmd_centroid(args):
    pset = _point_set(args)
    kind = args.kind
    if kind == "right":
        return {"value": centroids.right_centroid(pset)}
    if kind == "cosh":
        return {"value": centroids.cosh_centroid(pset)}
    if kind == "jeffreys":
        if pset.points[0].size == 1:
            return {"value": centroids.jeffreys_centroid_1d(pset)}
        return {"value": centroids.jeffreys_centroid_categorical(pset)}
    if kind == "logdet-cosh":
        mats = WeightedParamSet([SpdMatrix(np.asarray(p, dtype=float).reshape(
            int(math.isqrt(p.size)), -1)) for p in pset.points], pset.weights)
        return {"value": centroids.logdet_cosh_centroid(mats).entries.ravel()}
    m = pset.points[0].size
    g = _make_generator(args.generator or "quadratic", m, args)
    if kind == "left":
        return {"value": centroids.left_centroid(g, pset)}
    if kind == "symmetrized":
        cfg = CccpConfig(epsilon=args.cccp_epsilon, max_rounds=args.max_iter,
                         mode=args.mode)
        theta, trace = centroids.cccp_symmetrized_centroid(g, pset, cfg)
        return {"value": theta, "rounds": len(trace) - 1}
    if kind == "curved":
        model = _curved_model(args)
        init = _parse_vector(args.init) if args.init else pset.points[0]
        u = centroids.curved_centroid(g, model, pset, init)
        return {"value": u}
    raise DomainError(f"unknown centroid kind {kind!r}")


def _cmd_project(args):
    target = _parse_vector(args.target)
    g = _make_generator(args.generator or "quadratic", target.size, args)
    model = _curved_model(args)
    init = _parse_vector(args.init) if args.init else 0.5 * (
        model.bounds[0] + model.bounds[1])
    lo, hi = model.bounds

    def objective(u):
        try:
            return divergences.bregman(g, target, model(u))
        except DomainError:
            return math.inf

    u, val = centroids._descend(objective, init, lo, hi)
    return {"value": u, "divergence": val}


def _cmd_sphere_intersect(args):
    with open(args.spheres) as fh:
        raw = json.load(fh)
    pairs = [(np.asarray(s["center"], dtype=float), float(s["radius"]))
             for s in raw]
    if args.alpha is not None:
        result = spheres.alpha_sphere_intersection(
            args.alpha, pairs, simplex_constraint=args.simplex, grid=args.grid)
    else:
        m = pairs[0][0].size
        g = _make_generator(args.generator or "quadratic", m, args)
        ss = [spheres.BregmanSphere(g, c, r) for c, r in pairs]
        result = spheres.intersect_right_spheres(g, ss, grid=args.grid)
    return {"points": [list(p) for p in result.points],
            "residuals": [list(r) for r in result.residuals],
            "enumerable": result.enumerable}


def _cmd_cccp_trace(args):
    pset = _point_set(args)
    m = pset.points[0].size
    g = _make_generator(args.generator or "extended-kl", m, args)
    cfg = CccpConfig(epsilon=args.cccp_epsilon, max_rounds=args.max_iter,
                     mode=args.mode)
    theta, trace = centroids.cccp_symmetrized_centroid(g, pset, cfg)
    rows = [{"round": i, "theta": list(th),
             "objective": centroids.cccp_objective(g, pset, cfg.epsilon, th)}
            for i, th in enumerate(trace)]
    return {"value": theta, "trace": rows}


# ---------------------------------------------------------------------------

def _build_parser():
    p = argparse.ArgumentParser(prog="bregmangeo",
                                description="Bregman divergence geometry toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--generator", default=None)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--alpha", type=float, default=None)
        sp.add_argument("--awq-alpha", type=float, default=None)
        sp.add_argument("--awq-beta", type=float, default=None)
        sp.add_argument("--epsilon", "--cccp-epsilon", dest="cccp_epsilon",
                        type=float, default=1e-4)
        sp.add_argument("--max-iter", type=int, default=200000)
        sp.add_argument("--mode", choices=("primal", "dual", "mixed"),
                        default="primal")

    sp = sub.add_parser("div", help="evaluate a divergence")
    common(sp)
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp.add_argument("--symmetrized", action="store_true")
    sp.set_defaults(func=_cmd_div)

    sp = sub.add_parser("centroid", help="compute a centroid")
    common(sp)
    sp.add_argument("--kind", required=True)
    sp.add_argument("--points", default=None)
    sp.add_argument("--weights", default=None)
    sp.add_argument("--points-file", default=None)
    sp.add_argument("--model", default="circle")
    sp.add_argument("--init", default=None)
    sp.set_defaults(func=_cmd_centroid)

    sp = sub.add_parser("project", help="right Bregman projection onto a model")
    common(sp)
    sp.add_argument("--target", required=True)
    sp.add_argument("--model", default="circle")
    sp.add_argument("--init", default=None)
    sp.set_defaults(func=_cmd_project)

    sp = sub.add_parser("sphere-intersect", help="intersect Bregman/alpha spheres")
    common(sp)
    sp.add_argument("--spheres", required=True, help="JSON file of {center, radius}")
    sp.add_argument("--simplex", action="store_true")
    sp.add_argument("--grid", type=int, default=256)
    sp.set_defaults(func=_cmd_sphere_intersect)

    sp = sub.add_parser("cccp-trace", help="emit per-round CCCP iterates")
    common(sp)
    sp.add_argument("--points", default=None)
    sp.add_argument("--weights", default=None)
    sp.add_argument("--points-file", default=None)
    sp.set_defaults(func=_cmd_cccp_trace)
    return p


def main(argv=None):
    args = _build_parser().parse_args(argv)
    np.random.seed(args.seed)
    try:
        result = args.func(args)
    except (DomainError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        sys.stdout.write(_jsonable({"error": str(exc)}) + "\n")
        return 1
    except (ConvergenceError, AmbiguityError) as exc:
        sys.stdout.write(_jsonable({"error": str(exc)}) + "\n")
        return 2
    _emit(result, args.format)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 2 parse error, 3 invalid index, 4 domain precondition
failure, 5 internal assertion (a reproduction file is written).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .exchange import (
    FrozenMutation,
    GreenSeqError,
    HasFrozen,
    InvalidMatrix,
    MutationStepError,
    NotSkewSymmetrizable,
    SignIncoherent,
    mutate_sequence,
    verdict,
)
from .io import (
    ParseError,
    dumps,
    layering_from_doc,
    matrix_from_doc,
    matrix_to_doc,
    parse_sequence,
    quiver_from_doc,
    read_json,
)
from .layering import Layering, enumerate_full_shuffles
from .permpath import NotContiguous, enumerate_contiguous_paths, word_to_path
from .quiver import InvalidQuiver, export_dot, to_quiver
from .verify import (
    FAMILIES,
    CounterexampleError,
    InstanceFamily,
    PreconditionError,
    certify,
    generate,
    instance_from_doc,
    instance_to_doc,
    verify_theorem_a,
    verify_theorem_b,
)

EXIT_OK, EXIT_PARSE, EXIT_INDEX, EXIT_DOMAIN, EXIT_INTERNAL = 0, 2, 3, 4, 5
DEFAULT_SEED = 20240601


class CliError(Exception):
    def __init__(self, code: int, message: str, repro: dict | None = None):
        super().__init__(message)
        self.code = code
        self.repro = repro


def _load_matrix(path: str):
    try:
        return matrix_from_doc(read_json(path))
    except (InvalidMatrix, NotSkewSymmetrizable) as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from exc


def _load_layering(path: str) -> Layering:
    return layering_from_doc(read_json(path))


def _index_error(exc: MutationStepError) -> CliError:
    if isinstance(exc.cause, SignIncoherent):
        return CliError(EXIT_INTERNAL, str(exc))
    return CliError(EXIT_INDEX, f"invalid index at step {exc.step}: vertex {exc.vertex} "
                                f"({exc.cause})")


def _check_coverage(B, eta: Layering):
    ex_eta = eta.exchange_only()
    missing = [v for v in B.ex if v not in ex_eta.eta]
    if missing:
        raise CliError(EXIT_PARSE, f"layering has no level for vertices {missing}")
    extra = [v for v in ex_eta.domain if v not in B.ex]
    if extra:
        raise CliError(EXIT_PARSE, f"layering names vertices {extra} missing from the matrix")


def _write_report(path: str, command: str, inputs: dict, payload, started: float):
    body = json.dumps({"command": command, "inputs": inputs, "payload": payload},
                      sort_keys=True, separators=(",", ":"))
    report = {
        "command": command,
        "inputs": inputs,
        "version": __version__,
        "payload": payload,
        "payload_digest": hashlib.sha256(body.encode()).hexdigest(),
        "duration_s": round(time.perf_counter() - started, 6),
    }
    Path(path).write_text(dumps(report) + "\n")


def cmd_mutate(args) -> int:
    B = _load_matrix(args.matrix)
    seq = parse_sequence(args.at if args.at is not None else args.seq)
    try:
        B = mutate_sequence(B, seq)
    except MutationStepError as exc:
        raise _index_error(exc) from exc
    print(dumps(matrix_to_doc(B)))
    return EXIT_OK


def cmd_check_green(args) -> int:
    started = time.perf_counter()
    B = _load_matrix(args.matrix)
    seq = parse_sequence(args.seq)
    if B.fr:
        raise CliError(EXIT_DOMAIN, "check-green needs a matrix without frozen rows")
    try:
        v = verdict(B, seq)
    except MutationStepError as exc:
        err = _index_error(exc)
        err.repro = {"matrix": matrix_to_doc(B), "seq": list(seq)}
        raise err from exc
    print(v.line())
    if args.report:
        _write_report(args.report, "check-green",
                      {"matrix": matrix_to_doc(B), "seq": list(seq)}, v.to_dict(), started)
    return EXIT_OK


def _certificate_or_fail(fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except CounterexampleError as exc:
        raise CliError(EXIT_INTERNAL, str(exc), exc.certificate.to_dict()) from exc
    except MutationStepError as exc:
        raise _index_error(exc) from exc
    except PreconditionError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from exc


def cmd_tsystem(args) -> int:
    started = time.perf_counter()
    B = _load_matrix(args.matrix)
    eta = _load_layering(args.eta)
    if B.fr:
        raise CliError(EXIT_DOMAIN, "tsystem needs a matrix without frozen rows")
    _check_coverage(B, eta)
    if args.enumerate:
        seqs = list(enumerate_full_shuffles(eta, args.limit))
    else:
        seqs = [parse_sequence(args.seq or "")]
    certs = []
    for seq in seqs:
        cert = _certificate_or_fail(verify_theorem_b, B, eta, seq,
                                    truncations=args.truncations)
        certs.append(cert.to_dict())
        status = "MAXIMAL_GREEN" if cert.maximal_green else cert.verdict.kind.value
        print(f"{status} length={len(seq)} full={cert.full} layered={cert.layered} "
              f"seq={' '.join(map(str, seq))}", file=sys.stderr)
    print(dumps(certs))
    if args.report:
        _write_report(args.report, "tsystem",
                      {"matrix": matrix_to_doc(B), "eta": eta.to_doc(),
                       "sequences": [list(s) for s in seqs]}, certs, started)
    return EXIT_OK


def cmd_paths(args) -> int:
    if args.n < 2:
        raise CliError(EXIT_DOMAIN, "--n must be at least 2")
    for path in enumerate_contiguous_paths(args.n, args.limit):
        if args.words:
            print(" ".join(map(str, path.word)))
        else:
            print(" -> ".join("[" + " ".join(map(str, p)) + "]" for p in path.perms))
    return EXIT_OK


def cmd_theorem_a(args) -> int:
    started = time.perf_counter()
    eta = _load_layering(args.eta)
    if eta.mode.value != "full":
        raise CliError(EXIT_DOMAIN, "theorem-a needs a layering with mode 'full'")
    N = len(eta.domain)
    if set(eta.domain) != set(range(1, N + 1)):
        raise CliError(EXIT_PARSE, f"layering must cover 1..{N}")
    if N < 2:
        raise CliError(EXIT_DOMAIN, "theorem-a needs N >= 2")
    if args.word is not None:
        try:
            path = word_to_path(parse_sequence(args.word), N)
        except NotContiguous as exc:
            raise CliError(EXIT_DOMAIN, f"NotContiguous: {exc}") from exc
    else:
        index = args.path_index or 0
        path = next((p for i, p in enumerate(enumerate_contiguous_paths(N, index + 1))
                     if i == index), None)
        if path is None:
            raise CliError(EXIT_DOMAIN, f"there is no contiguous path with index {index}")
    B = _load_matrix(args.matrix) if args.matrix else None
    if B is not None:
        if B.fr:
            raise CliError(EXIT_DOMAIN, "theorem-a needs a matrix without frozen rows")
        _check_coverage(B, eta)
    cert = _certificate_or_fail(verify_theorem_a, B, eta, path, truncations=args.truncations)
    print(f"{cert.verdict.kind.value} length={len(cert.sequence)} "
          f"seq={' '.join(map(str, cert.sequence))}", file=sys.stderr)
    payload = cert.to_dict()
    print(dumps(payload))
    if args.report:
        _write_report(args.report, "theorem-a",
                      {"eta": eta.to_doc(), "word": list(path.word),
                       "matrix": None if B is None else matrix_to_doc(B)}, payload, started)
    return EXIT_OK


def cmd_export_dot(args) -> int:
    doc = read_json(args.file)
    if "arrows" in doc:
        Q = quiver_from_doc(doc)
    else:
        Q = to_quiver(matrix_from_doc(doc))
    eta = _load_layering(args.eta) if args.eta else None
    sys.stdout.write(export_dot(Q, eta))
    return EXIT_OK


def cmd_corpus_generate(args) -> int:
    sizes = tuple(parse_sequence(args.sizes)) if args.sizes else ()
    family = InstanceFamily(args.family, n=args.n, level_sizes=sizes, density=args.density,
                            seed=args.seed, count=args.count, max_label=args.max_label)
    out = Path(args.out) / args.family
    out.mkdir(parents=True, exist_ok=True)
    written = set()
    for inst in generate(family):
        # identical instances share a digest and hence a file
        doc = instance_to_doc(inst)
        (out / f"{inst.digest}.json").write_text(dumps({"instance": doc}) + "\n")
        written.add(inst.digest)
    print(f"wrote {len(written)} instances to {out}")
    return EXIT_OK


def _verify_file(path: str) -> tuple[str, dict | None, str | None]:
    doc = read_json(path)
    inst = instance_from_doc(doc["instance"])
    try:
        cert = certify(inst)
    except CounterexampleError as exc:
        return path, exc.certificate.to_dict(), str(exc)
    return path, cert.to_dict(), None


def cmd_corpus_verify(args) -> int:
    files = sorted(str(p) for p in Path(args.dir).rglob("*.json"))
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_verify_file, files))
    else:
        results = [_verify_file(f) for f in files]
    failures = []
    maximal = 0
    for path, cert, failure in results:
        doc = read_json(path)
        doc["certificate"] = cert
        Path(path).write_text(dumps(doc) + "\n")
        if failure:
            failures.append((path, failure))
        elif cert["verdict"]["kind"] == "MAXIMAL_GREEN":
            maximal += 1
    print(f"verified {len(results)} instances: {maximal} maximal green, "
          f"{len(failures)} counterexamples")
    if failures:
        for path, failure in failures:
            print(f"COUNTEREXAMPLE {path}: {failure}", file=sys.stderr)
        raise CliError(EXIT_INTERNAL, "corpus contains counterexamples",
                       {"files": [p for p, _ in failures]})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greenseq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--dump-dir", default=".",
                        help="where reproduction files for internal failures go")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mutate", help="mutate an exchange matrix")
    p.add_argument("matrix")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--at")
    g.add_argument("--seq")
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("check-green", help="classify a mutation sequence")
    p.add_argument("matrix")
    p.add_argument("--seq", default="")
    p.add_argument("--report")
    p.set_defaults(func=cmd_check_green)

    p = sub.add_parser("tsystem", help="certify full layered T-systems")
    p.add_argument("matrix")
    p.add_argument("eta")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--seq")
    g.add_argument("--enumerate", action="store_true")
    p.add_argument("--limit", type=int, default=1000)
    p.add_argument("--truncations", action="store_true")
    p.add_argument("--report")
    p.set_defaults(func=cmd_tsystem)

    p = sub.add_parser("paths", help="list contiguous paths")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--limit", type=int)
    p.add_argument("--words", action="store_true")
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("theorem-a", help="certify the sequence of a contiguous path")
    p.add_argument("eta")
    p.add_argument("matrix", nargs="?")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--path-index", type=int)
    g.add_argument("--word")
    p.add_argument("--truncations", action="store_true")
    p.add_argument("--report")
    p.set_defaults(func=cmd_theorem_a)

    p = sub.add_parser("export-dot", help="render a matrix or quiver as Graphviz DOT")
    p.add_argument("file")
    p.add_argument("--eta")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("corpus", help="generate or verify instance corpora")
    csub = p.add_subparsers(dest="corpus_command", required=True)
    c = csub.add_parser("generate")
    c.add_argument("--family", choices=FAMILIES, required=True)
    c.add_argument("--out", default="corpus")
    c.add_argument("--n", type=int, default=3)
    c.add_argument("--sizes", help="level sizes, e.g. '2,3'")
    c.add_argument("--density", type=float, default=0.0)
    c.add_argument("--count", type=int, default=10)
    c.add_argument("--max-label", type=int, default=3)
    c.add_argument("--seed", type=int, default=DEFAULT_SEED)
    c.set_defaults(func=cmd_corpus_generate)
    c = csub.add_parser("verify")
    c.add_argument("dir")
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_corpus_verify)
    return parser


def _dump_repro(dump_dir: str, command: str, argv, repro: dict | None) -> Path:
    body = {"command": command, "argv": list(argv), "data": repro}
    text = dumps(body)
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    path = Path(dump_dir) / f"greenseq-repro-{digest}.json"
    path.write_text(text + "\n")
    return path


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.code == EXIT_INTERNAL:
            path = _dump_repro(args.dump_dir, args.command, argv, exc.repro)
            print(f"reproduction written to {path}", file=sys.stderr)
        return exc.code
    except (ParseError, InvalidQuiver) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FrozenMutation, HasFrozen, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INDEX
    except (SignIncoherent, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        path = _dump_repro(args.dump_dir, args.command, argv, None)
        print(f"reproduction written to {path}", file=sys.stderr)
        return EXIT_INTERNAL
    except GreenSeqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())

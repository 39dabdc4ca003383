"""Command-line front end: ``divseq <command> ...``.

Exit codes: 0 success, 1 usage error, 2 computation aborted by the size
guard, 3 certificate replay failure.  Reports are JSON on stdout; errors
are JSON on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .deduce import (
    Fact,
    FactStore,
    apply_rules,
    assert_fact,
    dumps_store,
    kernel_fact,
    loads_store,
    parse_statement,
    query,
)
from .dynamics import NONZERO, POSITIVE, Budget, SequenceParams, census, orbit
from .errors import (
    DivseqError,
    InvalidCertificate,
    SchemaVersionMismatch,
    SizeGuardError,
)
from .presentation import HarvestConfig, build_overline, harvest, kernel_member, quotient_report

REPORT_SCHEMA = "divseq-report/1"

EXIT_OK, EXIT_USAGE, EXIT_ABORTED, EXIT_REPLAY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _seed_range(text):
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers in {text!r}") from None


def _add_params(sp):
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--domain", choices=(POSITIVE, NONZERO), default=POSITIVE)
    sp.add_argument("--allow-unusual-params", action="store_true",
                    help="accept p < 1 or |q| < 2")


def _add_budget(sp):
    sp.add_argument("--max-steps", type=int, default=None)
    sp.add_argument("--max-magnitude", type=int, default=None)


def _add_harvest(sp):
    sp.add_argument("--seed-bound", type=int, default=1)
    sp.add_argument("--depth", type=int, default=0, help="trajectory harvesting depth")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--prime-bound", type=int, default=None)
    g.add_argument("--adaptive", action="store_true", help="grow the prime basis (default)")


def build_parser():
    ap = _Parser(prog="divseq", description="Division sequences and their presentations.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("orbit", help="iterate the map from one seed")
    _add_params(sp)
    sp.add_argument("--seed", type=int, required=True)
    _add_budget(sp)

    sp = sub.add_parser("census", help="classify every seed in a range")
    _add_params(sp)
    sp.add_argument("--seeds", type=_seed_range, required=True, metavar="A..B")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    _add_budget(sp)

    sp = sub.add_parser("present", help="truncated quotient of the harvested presentation")
    _add_params(sp)
    _add_harvest(sp)
    _add_budget(sp)

    sp = sub.add_parser("kernel", help="kernel certificate for one element")
    _add_params(sp)
    sp.add_argument("--element", type=int, required=True)
    _add_harvest(sp)
    _add_budget(sp)

    sp = sub.add_parser("overline", help="overline presentation from a census")
    _add_params(sp)
    sp.add_argument("--seeds", type=_seed_range, required=True, metavar="A..B")
    sp.add_argument("--allow-hypotheses", action="store_true")
    sp.add_argument("--jobs", type=int, default=1)
    _add_harvest(sp)
    _add_budget(sp)

    sp = sub.add_parser("deduce", help="assert facts, apply rules, query a fact store")
    sp.add_argument("--store", required=True, help="fact store file (created if missing)")
    sp.add_argument("--assert", dest="assertions", action="append", default=[],
                    metavar="FACT-JSON", help="fact JSON, kernel report JSON, or statement text")
    sp.add_argument("--apply", action="store_true")
    sp.add_argument("--max-rounds", type=int, default=10)
    sp.add_argument("--query", action="append", default=[], metavar="PATTERN")
    return ap


def _params(a):
    return SequenceParams(a.p, a.q, a.domain, allow_unusual=a.allow_unusual_params)


def _budget(a):
    kw = {}
    if a.max_steps is not None:
        kw["max_steps"] = a.max_steps
    if a.max_magnitude is not None:
        kw["max_magnitude"] = a.max_magnitude
    return Budget(**kw)


def _harvest_config(a):
    return HarvestConfig(a.seed_bound, a.depth, _budget(a), a.prime_bound)


def _report(command, **body):
    return {"schema": REPORT_SCHEMA, "command": command, **body}


def _check_seed_range(a):
    lo, hi = a.seeds
    if lo > hi:
        raise UsageError(f"empty seed range {lo}..{hi}")
    if a.domain == POSITIVE and lo < 1:
        raise UsageError("seed ranges in the pos domain must start at 1 or above")


def cmd_orbit(a):
    params = _params(a)
    if a.seed == 0 or (a.domain == POSITIVE and a.seed < 0):
        raise UsageError(f"seed {a.seed} is not in the {a.domain} domain")
    res = orbit(a.seed, params, _budget(a))
    return _report("orbit", params=_pjson(params), **res.to_json())


def _pjson(params):
    return {"p": params.p, "q": params.q, "domain": params.domain}


def cmd_census(a, out):
    _check_seed_range(a)
    if a.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    part = census(_params(a), a.seeds, _budget(a), jobs=a.jobs)
    if a.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["seed", "status", "cycle_id", "cycle_min"],
                           lineterminator="\n")
        w.writeheader()
        w.writerows(part.per_seed_rows())
        out.write(buf.getvalue())
        return None
    return _report("census", **part.summary())


def cmd_present(a):
    h = harvest(_params(a), _harvest_config(a))
    rep = quotient_report(h)
    return _report("present", harvest=h.config.to_json(), **rep.to_json())


def cmd_kernel(a):
    params = _params(a)
    if a.element == 0 or (a.domain == POSITIVE and a.element < 0):
        raise UsageError(f"element {a.element} is not in the {a.domain} domain")
    h = harvest(params, _harvest_config(a))
    res = kernel_member(a.element, h)
    if not res:
        return _report("kernel", params=_pjson(params), **res.to_json())
    if not res.replay():
        raise InvalidCertificate(f"certificate for {a.element} failed to replay")
    fact = kernel_fact(res, source={"harvest": h.config.to_json()})
    return _report("kernel", params=_pjson(params), result="yes",
                   certificate=res.to_json(), fact=fact.to_json())


def cmd_overline(a):
    _check_seed_range(a)
    params = _params(a)
    part = census(params, a.seeds, _budget(a), jobs=max(1, a.jobs))
    oh = build_overline(params, part, _harvest_config(a), a.allow_hypotheses)
    return _report("overline", **oh.summary())


def _parse_assertion(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        return Fact(parse_statement(text))
    if isinstance(doc, str):
        return Fact(parse_statement(doc))
    if not isinstance(doc, dict):
        raise UsageError("--assert expects a JSON object or a statement")
    if "fact" in doc:
        doc = doc["fact"]
    if "statement" not in doc:
        raise UsageError("fact JSON needs a 'statement' field")
    fact = Fact.from_json(doc)
    fact.id = None
    return fact


def cmd_deduce(a):
    if os.path.exists(a.store):
        with open(a.store, encoding="utf-8") as fh:
            store = loads_store(fh.read())
    else:
        store = FactStore()
    asserted = []
    for text in a.assertions:
        fact = _parse_assertion(text)
        asserted.append(assert_fact(store, fact).to_json())
    derived = []
    if a.apply:
        derived = [f.to_json() for f in apply_rules(store, a.max_rounds)]
    results = {pat: query(store, pat) for pat in a.query}
    tmp = a.store + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(dumps_store(store))
    os.replace(tmp, a.store)
    return _report("deduce", store=a.store, facts=len(store), asserted=asserted,
                   derived=derived, queries=results)


def _emit_error(kind, message, code):
    json.dump({"schema": REPORT_SCHEMA, "error": kind, "message": message, "exit_code": code},
              sys.stderr, sort_keys=True)
    sys.stderr.write("\n")
    return code


def main(argv=None):
    out = sys.stdout
    try:
        a = build_parser().parse_args(argv)
        if a.command == "census":
            doc = cmd_census(a, out)
        else:
            doc = {
                "orbit": cmd_orbit,
                "present": cmd_present,
                "kernel": cmd_kernel,
                "overline": cmd_overline,
                "deduce": cmd_deduce,
            }[a.command](a)
        if doc is not None:
            out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    except UsageError as exc:
        return _emit_error("usage", str(exc), EXIT_USAGE)
    except SizeGuardError as exc:
        return _emit_error("size_guard", str(exc), EXIT_ABORTED)
    except InvalidCertificate as exc:
        return _emit_error("replay_failure", str(exc), EXIT_REPLAY)
    except SchemaVersionMismatch as exc:
        return _emit_error("usage", str(exc), EXIT_USAGE)
    except (DivseqError, ValueError) as exc:
        return _emit_error("usage", str(exc), EXIT_USAGE)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

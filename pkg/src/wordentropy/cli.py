"""Command-line entry point.

Subcommands: ``analyze`` (bound -> JSON report), ``generate`` (word -> letter
file plus ``.meta.json`` sidecar), ``profile`` (word -> ``n,count`` CSV),
``verify`` (re-check reports, certificate transcripts and generated words)
and ``min`` (the min{f, g} experiment).

Exit codes: 0 success, 1 usage or input error, 2 budget exceeded (partial
output still written), 3 certification or verification failed.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .bounds import BoundSyntaxError, parse_bound
from .bounds import expr as E
from .bounds.analysis import check_conditions, e0_bounds
from .bounds.effective import as_real
from .bounds.reals import UndecidableError, compare
from .engine.bracket import BracketOptions, ew_bracket, min_experiment
from .engine.certificate import SCHEMA as CERT_SCHEMA
from .engine.certificate import verify as verify_certificate
from .engine.slice import DEFAULT_BUDGET, enumerate_slice
from .fractal import dimension_report
from .generators import (
    champernowne,
    exp_order_word,
    prop6_word,
    sft_from_forbidden,
    transitive_word,
)
from .words.factors import FactorIndex, special_factor_stats
from .words.stream import DIGITS, BudgetExceeded, WordStream, as_word

REPORT_SCHEMA = "wordentropy.report/1"
EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_CERT = 0, 1, 2, 3

#: keys a ``key=value`` config file may preset (flag destinations)
CONFIG_KEYS = {
    "budget": int, "max_n": int, "sft_memory": int, "workers": int, "N0": int,
    "n0": int, "max_N0": int, "horizon": int, "window": int, "length": int,
}
DEFAULTS = {
    "budget": DEFAULT_BUDGET, "max_n": 20, "sft_memory": 4, "workers": 1, "N0": 200,
    "n0": 20, "max_N0": 8192, "horizon": 64, "window": 64, "length": None,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 (argparse would use 2, which means "budget" here)
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- output helpers ----------------------------------------------------------------


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def content_hash(report: dict) -> str:
    body = {k: v for k, v in report.items() if k != "hash"}
    return hashlib.sha256(json.dumps(body, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def write_atomic(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_config(path: str) -> Dict[str, object]:
    out: Dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = CONFIG_KEYS[key](val)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: bad value for {key}: {val!r}") from None
    return out


def resolve(args, keys: Sequence[str]) -> None:
    """Fill unset options from the config file, then defaults."""
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    for k in keys:
        if getattr(args, k, None) is None:
            setattr(args, k, cfg.get(k, DEFAULTS[k]))


def format_letters(letters: np.ndarray, q: int) -> str:
    if q <= 10:
        return "".join(DIGITS[int(a)] for a in letters.tolist())
    return ",".join(str(int(a)) for a in letters.tolist())


def read_letters(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        text = fh.read().strip()
    if not text:
        return np.zeros(0, dtype=np.uint8)
    if "," in text:
        return np.array([int(t) for t in text.replace("\n", "").split(",") if t.strip()], dtype=np.uint8)
    return as_word("".join(text.split()))


def read_sidecar(path: str) -> Optional[dict]:
    side = path + ".meta.json"
    if os.path.exists(side):
        with open(side, encoding="utf-8") as fh:
            return json.load(fh)
    return None


# -- bounds and words ----------------------------------------------------------------


def load_bound(args):
    text = args.f if args.f is not None else args.preset
    if text is None:
        raise UsageError("give --f SPEC or --preset NAME")
    if args.f is None and not text.startswith("preset:"):
        text = "preset:" + text
    try:
        return text, parse_bound(text)
    except (BoundSyntaxError, ValueError, KeyError) as exc:
        raise UsageError(f"bad bound {text!r}: {exc}") from None


def build_word(args) -> WordStream:
    kind = args.word
    if kind == "champernowne":
        return champernowne(args.q or 2)
    if kind == "prop6":
        return prop6_word(args.c if args.c is not None else "0.3")[1]
    if kind == "sft":
        if not args.forbid:
            raise UsageError("--word sft needs --forbid")
        forbidden = [w for item in args.forbid for w in item.split(",") if w]
        return transitive_word(sft_from_forbidden(args.q or 2, forbidden))
    if kind == "exp-order":
        if args.h is None:
            raise UsageError("--word exp-order needs --h")
        return exp_order_word(args.h)
    raise UsageError(f"unknown word {kind!r}")


def word_params(args) -> dict:
    p = {"word": args.word}
    if args.word == "champernowne":
        p["q"] = args.q or 2
    elif args.word == "prop6":
        p["c"] = args.c if args.c is not None else "0.3"
    elif args.word == "sft":
        p["q"] = args.q or 2
        p["forbid"] = sorted(w for item in args.forbid for w in item.split(",") if w)
    elif args.word == "exp-order":
        p["h"] = args.h
    return p


def saturation_table(w: WordStream, length: int, n_cap: int = 64) -> Dict[str, int]:
    out: Dict[str, int] = {}
    if w.saturation is None:
        return out
    for N in range(1, n_cap + 1):
        s = w.saturating_length(N)
        if s is None or s > length:
            break
        out[str(N)] = int(s)
    return out


# -- subcommands -------------------------------------------------------------------


def cmd_analyze(args) -> int:
    resolve(args, ["budget", "max_n", "sft_memory", "workers", "N0", "n0", "max_N0", "horizon", "window"])
    text, f = load_bound(args)
    q = args.q or f.q
    e0 = e0_bounds(f, args.window)
    cond = check_conditions(f, args.horizon)
    code = EXIT_OK
    s = enumerate_slice(f, args.max_n, args.budget, q=q, workers=args.workers)
    if s.truncated:
        code = EXIT_BUDGET
    opts = BracketOptions(N=s.N, m_max=args.sft_memory, budget=args.budget, N0=args.N0, n0=args.n0,
                          max_N0=args.max_N0, q=q, workers=args.workers)
    br = ew_bracket(f, opts, s=s)
    dim = dimension_report(f, bracket=br)
    ratio = None
    ratio_bounds = None
    if e0.upper > 0 and e0.lower > 0:
        ratio = br.lower / e0.upper
        ratio_bounds = [br.lower / e0.upper, br.upper / e0.lower]
    report = {
        "schema": REPORT_SCHEMA,
        "tool": {"name": "wordentropy", "version": __version__},
        "function": {"spec": text, "canonical": f.text, "q": q},
        "e0": e0.as_dict(),
        "conditions": cond.as_dict(),
        "slice": s.summary(),
        "ew": {
            "lower": br.lower,
            "upper": br.upper,
            "certified": br.certified,
            "upper_witness": br.upper_witness.as_dict(),
            "certificate": br.certificate.transcript() if br.certificate else None,
            "search": [st.as_dict() for st in br.search],
        },
        "ratio": ratio,
        "ratio_bounds": ratio_bounds,
        "dimension": dim.as_dict(),
        "budgets": {"budget": args.budget, "max_n": args.max_n, "sft_memory": args.sft_memory,
                    "N0": args.N0, "n0": args.n0, "max_N0": args.max_N0, "horizon": args.horizon,
                    "window": args.window},
    }
    report["hash"] = content_hash(report)
    write_atomic(args.out, dumps(report))
    if args.transcript and br.certificate:
        write_atomic(args.transcript, dumps(br.certificate.transcript()))
    if code == EXIT_OK and args.require_certified and not br.certified:
        code = EXIT_CERT
    if code == EXIT_BUDGET:
        print(f"budget exceeded: {s.reason}; partial report written", file=sys.stderr)
    return code


def cmd_generate(args) -> int:
    resolve(args, ["length"])
    if args.length is None or args.length < 0:
        raise UsageError("--length L is required")
    w = build_word(args)
    try:
        letters = w.prefix(args.length)
    except BudgetExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BUDGET
    write_atomic(args.out, format_letters(letters, w.q) + "\n")
    if args.out and args.out != "-":
        meta = {
            "schema": "wordentropy.word/1",
            "name": w.name,
            "params": word_params(args),
            "q": w.q,
            "length": int(args.length),
            "format": "digits" if w.q <= 10 else "comma-separated",
            "saturating_lengths": saturation_table(w, args.length),
            "meta": w.meta,
        }
        sat = meta["saturating_lengths"]
        meta["saturated_N"] = max((int(k) for k in sat), default=0)
        if w.language_size is not None and sat:
            meta["language_sizes"] = [int(w.language_size(n)) for n in range(meta["saturated_N"] + 1)]
        write_atomic(args.out + ".meta.json", dumps(meta))
    return EXIT_OK


def _profile_rows(letters: np.ndarray, q: int, N: int, special: bool, rate: bool) -> List[list]:
    N = min(N, letters.size)
    counts = FactorIndex(letters, q).counts(N)
    rows = []
    for n in range(N + 1):
        row = [n, int(counts[n])]
        if special:
            row.append(special_factor_stats(letters, n).s if n < letters.size else "")
        if rate:
            row.append("" if n == 0 else repr(math.log(counts[n]) / n))
        rows.append(row)
    return rows


def cmd_profile(args) -> int:
    resolve(args, ["length"])
    if args.max_n is None or args.max_n < 0:
        raise UsageError("--max-n N is required")
    N = args.max_n
    if args.input:
        letters = read_letters(args.input)
        side = read_sidecar(args.input) or {}
        q = args.q or side.get("q") or max(2, int(letters.max()) + 1 if letters.size else 2)
        sat = side.get("saturated_N", 0)
        kind = "exact-for-language" if sat >= N else "lower-bound"
    elif args.word:
        w = build_word(args)
        q = w.q
        L = args.length
        if L is None:
            s = w.saturating_length(N)
            L = s if s is not None and s <= 10 ** 7 else 10 ** 6
        letters = w.prefix(L)
        s = w.saturating_length(N)
        kind = "exact-for-language" if s is not None and s <= L else "lower-bound"
    else:
        raise UsageError("give --in FILE or --word NAME")
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    header = ["n", "count"] + (["s"] if args.special else []) + (["rate"] if args.rate else [])
    wr.writerow(header)
    for row in _profile_rows(letters, q, N, args.special, args.rate):
        wr.writerow(row)
    write_atomic(args.out, buf.getvalue())
    print(f"profile kind: {kind}", file=sys.stderr)
    return EXIT_OK


def _verify_word(path: str, N: Optional[int]) -> Dict[str, bool]:
    side = read_sidecar(path)
    if side is None:
        raise UsageError(f"{path}: no .meta.json sidecar to verify against")
    letters = read_letters(path)
    q = int(side["q"])
    sat = int(side.get("saturated_N", 0))
    n_max = sat if N is None else min(N, sat)
    counts = FactorIndex(letters, q).counts(max(n_max, 1))
    checks: Dict[str, bool] = {"length": letters.size == side["length"]}
    sizes = side.get("language_sizes")
    if sizes:
        checks["saturated_counts"] = all(int(counts[n]) == sizes[n] for n in range(n_max + 1))
    params = side.get("params", {})
    if params.get("word") == "exp-order":
        h = as_real(params["h"])
        C = Fraction(side["meta"]["C"])
        lower_ok = upper_ok = True
        for n in range(1, n_max + 1):
            ehn = E.r_exp(E.r_mul(h, Fraction(n)))
            p = Fraction(int(counts[n]))
            try:
                lower_ok &= compare(ehn, p) <= 0
                upper_ok &= compare(p, E.r_mul(C, ehn)) <= 0
            except UndecidableError:
                lower_ok = upper_ok = False
        checks["e^(hn) <= p(n)"] = lower_ok
        checks["p(n) <= C e^(hn)"] = upper_ok
    return checks


def cmd_verify(args) -> int:
    path = args.input
    with open(path, encoding="utf-8") as fh:
        head = fh.read(1)
    if head == "{":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        schema = doc.get("schema", "")
        checks: Dict[str, bool] = {}
        if schema == REPORT_SCHEMA:
            checks["hash"] = doc.get("hash") == content_hash(doc)
            cert = doc.get("ew", {}).get("certificate")
            if cert is not None:
                res = verify_certificate(cert)
                checks.update({f"certificate.{k}": v for k, v in res.checks.items()})
                checks["certificate.lower"] = res.ok and cert["lower"] == doc["ew"]["lower"]
        elif schema == CERT_SCHEMA:
            checks.update(verify_certificate(doc).checks)
        else:
            raise UsageError(f"{path}: unknown schema {schema!r}")
    else:
        checks = _verify_word(path, args.max_n)
    ok = all(checks.values())
    out = {"input": os.path.basename(path), "ok": ok, "checks": checks}
    write_atomic(args.out, dumps(out))
    return EXIT_OK if ok else EXIT_CERT


def cmd_min(args) -> int:
    resolve(args, ["budget", "max_n", "sft_memory", "workers", "N0", "n0", "max_N0"])
    try:
        f, g = parse_bound(args.f), parse_bound(args.g)
    except (BoundSyntaxError, ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None
    opts = BracketOptions(N=args.max_n, m_max=args.sft_memory, budget=args.budget, N0=args.N0,
                          n0=args.n0, max_N0=args.max_N0, q=args.q, workers=args.workers)
    rep = min_experiment(f, g, opts)
    out = {"schema": "wordentropy.min/1", "f": f.text, "g": g.text, **rep.as_dict()}
    write_atomic(args.out, dumps(out))
    trunc = rep.f.truncated or rep.g.truncated or rep.fg.truncated
    return EXIT_BUDGET if trunc else EXIT_OK


# -- parser ------------------------------------------------------------------------


def _word_flags(p) -> None:
    p.add_argument("--word", choices=["champernowne", "prop6", "sft", "exp-order"])
    p.add_argument("--q", type=int, default=None, help="alphabet size (champernowne, sft)")
    p.add_argument("--c", default=None, help="prop6 constant c in (0, log 2] (default 0.3)")
    p.add_argument("--forbid", action="append", default=[],
                   help="forbidden word(s) for --word sft; repeat or comma-separate")
    p.add_argument("--h", default=None, help="entropy h > 0 for --word exp-order (e.g. 'log(3/2)')")
    p.add_argument("--length", type=int, default=None, help="number of letters")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="wordentropy", description="Word entropy of complexity bounds.")
    ap.add_argument("--version", action="version", version=f"wordentropy {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="conditions, entropy bracket and dimensions of a bound")
    a.add_argument("--f", default=None, help="bound specification, e.g. 'ceil(3^(n/2))'")
    a.add_argument("--preset", default=None, help="named preset, e.g. golden, cassaigne")
    a.add_argument("--q", type=int, default=None, help="alphabet size (default floor f(1))")
    a.add_argument("--max-n", dest="max_n", type=int, default=None, help="slice horizon N (default 20)")
    a.add_argument("--sft-memory", dest="sft_memory", type=int, default=None,
                   help="largest SFT memory tried for certificates (default 4)")
    a.add_argument("--budget", type=int, default=None, help="survivors per slice level")
    a.add_argument("--N0", dest="N0", type=int, default=None, help="initial certificate horizon (200)")
    a.add_argument("--n0", dest="n0", type=int, default=None, help="exponent witness length (20)")
    a.add_argument("--max-N0", dest="max_N0", type=int, default=None, help="largest certificate horizon (8192)")
    a.add_argument("--horizon", type=int, default=None, help="condition-check horizon (64)")
    a.add_argument("--window", type=int, default=None, help="Fekete scan window for E0 (64)")
    a.add_argument("--workers", type=int, default=None, help="threads for slice extension")
    a.add_argument("--require-certified", action="store_true", help="exit 3 without a certified lower bound")
    a.add_argument("--transcript", default=None, help="also write the certificate transcript here")
    a.add_argument("--config", default=None, help="key=value file presetting budgets")
    a.add_argument("--out", default=None, help="report path (default stdout)")
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("generate", help="write a prefix of one of the constructed words")
    _word_flags(g)
    g.add_argument("--config", default=None)
    g.add_argument("--out", default=None, help="letter file (sidecar <out>.meta.json)")
    g.set_defaults(func=cmd_generate)

    pr = sub.add_parser("profile", help="factor complexity of a word as CSV n,count")
    pr.add_argument("--in", dest="input", default=None, help="letter file to profile")
    _word_flags(pr)
    pr.add_argument("--max-n", dest="max_n", type=int, default=None)
    pr.add_argument("--special", action="store_true", help="add s(n) = sum over factors of (d+ - 1)")
    pr.add_argument("--rate", action="store_true", help="add (1/n) log p(n)")
    pr.add_argument("--config", default=None)
    pr.add_argument("--out", default=None, help="CSV path (default stdout)")
    pr.set_defaults(func=cmd_profile)

    v = sub.add_parser("verify", help="re-check a report, a certificate transcript or a generated word")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--max-n", dest="max_n", type=int, default=None)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("min", help="entropy brackets for f, g and min{f, g}")
    m.add_argument("--f", required=True)
    m.add_argument("--g", required=True)
    m.add_argument("--q", type=int, default=None)
    m.add_argument("--max-n", dest="max_n", type=int, default=None)
    m.add_argument("--sft-memory", dest="sft_memory", type=int, default=None)
    m.add_argument("--budget", type=int, default=None)
    m.add_argument("--N0", dest="N0", type=int, default=None)
    m.add_argument("--n0", dest="n0", type=int, default=None)
    m.add_argument("--max-N0", dest="max_N0", type=int, default=None)
    m.add_argument("--workers", type=int, default=None)
    m.add_argument("--config", default=None)
    m.add_argument("--out", default=None)
    m.set_defaults(func=cmd_min)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"wordentropy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"wordentropy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

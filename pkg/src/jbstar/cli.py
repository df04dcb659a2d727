"""``jbstar verify | roundtrip | stone``.

Exit codes: 0 every record passed (warnings allowed), 1 some record failed,
2 configuration or I/O error.
"""

import argparse
import json
import sys

from .errors import ConfigError, StructureMismatch
from .suites import TAGS, JobConfig, run_roundtrip, run_stone, run_verify

COMMANDS = {"verify": run_verify, "roundtrip": run_roundtrip, "stone": run_stone}
LIST_KEYS = {"suite", "model"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="jbstar", description="Seeded checks for finite-dimensional JB*-algebras.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--suite", action="append", help="statement tag or 'all' (repeatable): %s" % ", ".join(TAGS))
        s.add_argument("--model", action="append", help="model spec, e.g. matrix:3, spin:4, albert, matrix:2+matrix:2")
        s.add_argument("--target", help="target model for pair suites (default: same as source)")
        s.add_argument("--trials", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
        s.add_argument("--out", help="write the report here instead of stdout")
        s.add_argument("--format", choices=("json", "text"))
        s.add_argument("--workers", type=int)
        s.add_argument("--config", help="plain-text key=value file; flags take precedence")
    return p


def _parse_tol(items):
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError("tolerance %r is not NAME=VALUE" % item)
        try:
            out[name.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError("tolerance %r is not a number" % item) from exc
    return out


def read_config_file(path):
    """``key=value`` lines; ``#`` starts a comment; ``suite``/``model`` may
    repeat or hold comma-separated lists; ``tol.NAME=VALUE`` sets a tolerance."""
    values = {"tol": []}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError("cannot read config file: %s" % exc) from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError("%s:%d: expected key=value" % (path, n))
        key, value = key.strip(), value.strip()
        if key.startswith("tol."):
            values["tol"].append("%s=%s" % (key[4:], value))
        elif key == "tol":
            values["tol"].append(value)
        elif key in LIST_KEYS:
            values.setdefault(key, []).extend(v.strip() for v in value.split(",") if v.strip())
        elif key in ("trials", "seed", "workers"):
            try:
                values[key] = int(value)
            except ValueError as exc:
                raise ConfigError("%s:%d: %s must be an integer" % (path, n, key)) from exc
        elif key in ("out", "format", "target"):
            values[key] = value
        else:
            raise ConfigError("%s:%d: unknown key %r" % (path, n, key))
    return values


def config_from_args(args):
    base = read_config_file(args.config) if args.config else {"tol": []}
    tol = _parse_tol(base["tol"])
    tol.update(_parse_tol(args.tol or []))
    default = JobConfig()
    pick = lambda flag, key, fallback: flag if flag is not None else base.get(key, fallback)  # noqa: E731
    cfg = JobConfig(
        suites=tuple(pick(args.suite, "suite", list(default.suites))),
        models=tuple(pick(args.model, "model", list(default.models))),
        trials=pick(args.trials, "trials", default.trials),
        seed=pick(args.seed, "seed", default.seed),
        tolerances=tol,
        out=pick(args.out, "out", None),
        format=pick(args.format, "format", default.format),
        workers=pick(args.workers, "workers", default.workers),
        target=pick(args.target, "target", None),
    )
    return cfg.validate()


def render(report, fmt):
    if fmt == "text":
        return report.to_text()
    return json.dumps(report.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        report = COMMANDS[args.command](cfg)
        text = render(report, cfg.format)
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (ConfigError, StructureMismatch, OSError) as exc:
        sys.stderr.write("jbstar: error: %s\n" % exc)
        return 2
    return 0 if report.verdict == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())

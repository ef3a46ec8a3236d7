"""``surfkin`` command-line entry point."""

from __future__ import annotations

import os
import sys

from ..errors import ConfigError, SurfkinError
from ..profile import ProfileExpr, parse_profile
from .config import JobConfig, build_parser, config_from_args
from .jobs import RUNNERS, run_analyze, run_bonnet, run_check, run_evert, run_export
from .report import ResidualReport

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ERROR = 0, 1, 2, 3

__all__ = [
    "JobConfig",
    "ProfileExpr",
    "ResidualReport",
    "main",
    "parse_profile",
    "run_analyze",
    "run_bonnet",
    "run_check",
    "run_evert",
    "run_export",
]


def _emit(cfg, rep):
    text = rep.render(cfg.format)
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        path = os.path.join(cfg.out, f"{cfg.command}.{cfg.format}")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        bad = rep.failures
        print(f"{path}: {len(rep.results) - len(bad)} ok, {len(bad)} failed")
        for r in bad:
            print(f"  FAIL {r.name}: max {r.max:.3g} > {r.tol:g}")
    else:
        sys.stdout.write(text)


def main(argv=None):
    """Run one subcommand; exit code 0 iff every enabled check passes."""
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.command == "export-mesh":
            for path, nv, nf, dropped in run_export(cfg):
                warn = f", dropped {dropped} degenerate face(s)" if dropped else ""
                print(f"{path}: {nv} vertices, {nf} triangles{warn}")
            return EXIT_OK
        rep = RUNNERS[cfg.command](cfg)
        _emit(cfg, rep)
        return EXIT_OK if rep.passed else EXIT_FAIL
    except ConfigError as exc:
        print(f"surfkin: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SurfkinError, OSError) as exc:
        print(f"surfkin: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

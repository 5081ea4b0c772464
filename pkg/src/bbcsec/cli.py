"""Batch command-line surface: region computation, membership checks,
codebook inspection, and simulation.

Every command takes --seed (default 0; wall-clock entropy is never used),
so outputs are reproducible byte-for-byte. Commands that write files also
write a run-manifest sidecar (<out>.manifest.json) recording the command,
parameters, seed, tool version, and input digests.

Exit codes: 0 success, 1 usage, 2 validation, 3 resource guard.
"""

import datetime
import sys

import click
import numpy as np

from . import __version__, jsonio
from .channel import load_channel, load_chain_file
from .codebook import CodebookParams, generate, rate_check
from .exceptions import GuardError, ValidationError
from .probability import CondDist, Dist
from .region import (
    RateTuple,
    SearchParams,
    AuxChain,
    bbc_frontier,
    evaluate_chain,
    frontier_csv,
    membership,
    rc_re_star,
    secrecy_frontier,
    full_frontier,
)
from .simulate import SimConfig, run as run_simulation

_search_options = [
    click.option("--restarts", default=64, show_default=True, help="Random restarts per search."),
    click.option("--iterations", default=500, show_default=True, help="Ascent sweeps per restart."),
    click.option("--grid", default=17, show_default=True, help="Weight-direction count."),
    click.option("--tol", default=1e-7, show_default=True, help="Convergence tolerance."),
    click.option("--u-size", default=None, type=int, help="First-layer alphabet size."),
    click.option("--v-size", default=None, type=int, help="Second-layer alphabet size."),
    click.option("--workers", default=1, show_default=True, help="Parallel workers."),
]


def search_flags(fn):
    for opt in reversed(_search_options):
        fn = opt(fn)
    return fn


def _params_from_flags(restarts, iterations, grid, tol, u_size, v_size, workers, seed):
    return SearchParams(
        restarts=restarts, iterations=iterations, grid=grid, seed=seed,
        tol=tol, u_size=u_size, v_size=v_size, workers=workers,
    )


def _uniform_x_chain(x_size: int) -> AuxChain:
    """Constant first layer, uniform second layer mapped one-to-one onto the
    input alphabet."""
    return AuxChain(
        Dist(np.array([1.0])),
        CondDist(np.full((1, x_size), 1.0 / x_size)),
        CondDist(np.eye(x_size)),
    )


def _manifest(command: str, params: dict, seed: int, inputs: list) -> dict:
    return {
        "command": command,
        "parameters": params,
        "seed": seed,
        "version": __version__,
        "inputs": {str(p): jsonio.sha256_file(p) for p in inputs},
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


@click.group()
@click.version_option(__version__, prog_name="bbcsec")
def cli():
    """Rate regions and random-coding simulation for the bidirectional
    broadcast channel with a confidential message."""


@cli.command("info")
@click.argument("channel_file", type=click.Path())
@click.option("--chain", "chain_file", type=click.Path(), help="Auxiliary-chain file.")
@click.option("--uniform-x", is_flag=True, help="Use the uniform-input chain instead of a file.")
def cmd_info(channel_file, chain_file, uniform_x):
    """Information quantities and peak confidential rates for one chain."""
    if (chain_file is None) == (not uniform_x):
        raise click.UsageError("provide exactly one of --chain or --uniform-x")
    ch = load_channel(channel_file)
    if uniform_x:
        chain = _uniform_x_chain(ch.x_size)
    else:
        pu, pvu, pxv = load_chain_file(chain_file)
        chain = AuxChain(pu, pvu, pxv)
    iq = evaluate_chain(chain, ch)
    rc_star, re_star = rc_re_star(iq, 0.0, 0.0)
    doc = {
        "info_quantities": {"iu1": iq.iu1, "iu2": iq.iu2, "iv1": iq.iv1, "iv2": iq.iv2},
        "rc_star_at_zero_individual_rates": rc_star,
        "re_star": re_star,
        "chain": chain.to_dict(),
    }
    click.echo(jsonio.dumps(doc), nl=False)


@cli.command("region")
@click.argument("channel_file", type=click.Path())
@click.option("--mode", type=click.Choice(["bbc", "secrecy", "full"]), default="full", show_default=True)
@click.option("--weights", "n_weights", default=33, show_default=True, help="Weight directions to sample.")
@click.option("--out", type=click.Path(), default=None, help="CSV output path (stdout if omitted).")
@click.option("--seed", default=0, show_default=True)
@search_flags
def cmd_region(channel_file, mode, n_weights, out, seed, **flags):
    """Frontier of the selected region as a support-point CSV."""
    ch = load_channel(channel_file)
    flags = dict(flags, grid=n_weights)  # the sweep density is the weight count
    p = _params_from_flags(seed=seed, **{k: flags[k] for k in
                                         ("restarts", "iterations", "grid", "tol", "u_size", "v_size", "workers")})
    if mode == "bbc":
        entries = bbc_frontier(ch, p)
    elif mode == "secrecy":
        entries = secrecy_frontier(ch, p)
    else:
        entries = full_frontier(ch, p)
    csv_text = frontier_csv(entries)
    if out is None:
        click.echo(csv_text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        jsonio.dump(
            _manifest("region", {"mode": mode, "weights": n_weights, **flags}, seed, [channel_file]),
            str(out) + ".manifest.json",
        )


@cli.command("member")
@click.argument("channel_file", type=click.Path())
@click.option("--tuple", "tuple_str", required=True, help="rc,re,r1,r2 in bits per channel use.")
@click.option("--out", type=click.Path(), default=None, help="Report path (stdout if omitted).")
@click.option("--seed", default=0, show_default=True)
@search_flags
def cmd_member(channel_file, tuple_str, out, seed, **flags):
    """Membership verdict for one rate-equivocation tuple."""
    parts = tuple_str.split(",")
    if len(parts) != 4:
        raise click.BadParameter("expected four comma-separated rates", param_hint="--tuple")
    try:
        rates = [float(s) for s in parts]
        t = RateTuple(*rates)
    except (ValueError, ValidationError) as exc:
        raise click.BadParameter(str(exc), param_hint="--tuple")
    ch = load_channel(channel_file)
    p = _params_from_flags(seed=seed, **{k: flags[k] for k in
                                         ("restarts", "iterations", "grid", "tol", "u_size", "v_size", "workers")})
    result = membership(t, ch, p)
    text = jsonio.dumps(result.to_dict())
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        jsonio.dump(_manifest("member", {"tuple": tuple_str, **flags}, seed, [channel_file]),
                    str(out) + ".manifest.json")


def _parse_sizes(sizes: str) -> tuple:
    parts = sizes.split(",")
    if len(parts) != 5:
        raise click.BadParameter("expected m0,m1,m2,j,l", param_hint="--sizes")
    try:
        return tuple(int(s) for s in parts)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--sizes")


@cli.command("simulate")
@click.argument("channel_file", type=click.Path())
@click.argument("chain_file", type=click.Path())
@click.option("--n", "blocklength", default=8, show_default=True, help="Blocklength.")
@click.option("--sizes", default="1,1,1,2,2", show_default=True,
              help="m0,m1,m2,j,l index-set sizes (powers of two keep rates in bits exact).")
@click.option("--trials", default=200, show_default=True)
@click.option("--equiv", type=click.Choice(["exact", "mc", "none"]), default="exact", show_default=True)
@click.option("--mc-samples", default=2000, show_default=True)
@click.option("--epsilon", default=0.15, show_default=True, help="Typicality slack.")
@click.option("--k-size", default=None, type=int,
              help="Partition-class count; selects the stochastic construction.")
@click.option("--seed", default=0, show_default=True)
@click.option("--workers", default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Report path (stdout if omitted).")
def cmd_simulate(channel_file, chain_file, blocklength, sizes, trials, equiv, mc_samples,
                 epsilon, k_size, seed, workers, out):
    """Monte Carlo run of the full code: errors, equivocation, leakage.

    Infeasible rates are not an error; the report shows them.
    """
    ch = load_channel(channel_file)
    pu, pvu, pxv = load_chain_file(chain_file)
    chain = AuxChain(pu, pvu, pxv)
    m0, m1, m2, j, l = _parse_sizes(sizes)
    params = CodebookParams(n=blocklength, m0_size=m0, m1_size=m1, m2_size=m2,
                            j_size=j, l_size=l, epsilon=epsilon, seed=seed)
    cfg = SimConfig(trials=trials, params=params, chain=chain, channel=ch,
                    equiv_mode=equiv, mc_samples=mc_samples, seed=seed,
                    k_size=k_size, workers=workers)
    report = run_simulation(cfg)
    text = jsonio.dumps(report.to_dict())
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        jsonio.dump(
            _manifest("simulate",
                      {"n": blocklength, "sizes": sizes, "trials": trials, "equiv": equiv,
                       "mc_samples": mc_samples, "epsilon": epsilon, "k_size": k_size,
                       "workers": workers},
                      seed, [channel_file, chain_file]),
            str(out) + ".manifest.json",
        )


@cli.command("codebook")
@click.argument("channel_file", type=click.Path())
@click.argument("chain_file", type=click.Path())
@click.option("--n", "blocklength", default=8, show_default=True)
@click.option("--sizes", default="1,1,1,2,2", show_default=True,
              help="m0,m1,m2,j,l index-set sizes (powers of two keep rates in bits exact).")
@click.option("--epsilon", default=0.15, show_default=True)
@click.option("--delta", default=0.05, show_default=True, help="Rate-condition slack.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="Codebook dump path.")
def cmd_codebook(channel_file, chain_file, blocklength, sizes, epsilon, delta, seed, out):
    """Write a codebook dump (tiny instances) and print the rate-condition
    report."""
    ch = load_channel(channel_file)
    pu, pvu, pxv = load_chain_file(chain_file)
    chain = AuxChain(pu, pvu, pxv)
    m0, m1, m2, j, l = _parse_sizes(sizes)
    params = CodebookParams(n=blocklength, m0_size=m0, m1_size=m1, m2_size=m2,
                            j_size=j, l_size=l, epsilon=epsilon, seed=seed)
    cb = generate(params, chain, ch)
    jsonio.dump(cb.to_dict(), out)
    jsonio.dump(_manifest("codebook",
                          {"n": blocklength, "sizes": sizes, "epsilon": epsilon, "delta": delta},
                          seed, [channel_file, chain_file]),
                str(out) + ".manifest.json")
    iq = evaluate_chain(chain, ch)
    conditions = rate_check(params, iq, delta)
    click.echo(jsonio.dumps({"rate_conditions": [c.to_dict() for c in conditions]}), nl=False)


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:  # --help / --version
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except ValidationError as exc:
        click.echo(f"validation error: {exc}", err=True)
        return 2
    except GuardError as exc:
        click.echo(f"resource guard: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())

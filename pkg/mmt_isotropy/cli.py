"""
Command-line entry point: ``mmt-isotropy`` (or ``python -m mmt_isotropy``).

Results go to standard output or ``--out``; logs and error responses go to
standard error. Exit status: 0 success or true, 1 false or algebraic
failure, 2 usage or parse error, 3 budget exceeded.
"""

import functools
import json
import logging
from typing import List, Optional, Sequence, Tuple

import click
import numpy as np

from .config_manager import ConfigManager, configure_logging
from .errors import ConfigurationError, IsotropyError, NotMultiplicative, validate_error_response
from .field_linalg import FieldSpec
from .formats import (
    BUNDLED,
    format_element,
    format_stabilizer,
    format_tensor,
    load_bundled,
    parse_bilinear,
    parse_decomposition,
    parse_element,
    parse_linmap,
    parse_tensor,
    read_file,
    write_file,
)
from .isotropy import Perm3, apply, compose, equal_mod_scalars, invert, is_isotropy, normalize, rho_element
from .orbits import GroupMode, group_order, iter_group, orbit_equivalent, stabilizer
from .recovery import gamma_from_delta, recover_small_element, structure_tensor
from .tensor_space import Decomposition, Shape, build_mmt, decomposition_over, random_tensor
from .verify_suite import CHECKS, run_suite

logger = logging.getLogger(__name__)

LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
EXISTING_FILE = click.Path(exists=True, dir_okay=False)


def _fail(e: IsotropyError):
    response = e.to_response()
    if not validate_error_response(response):
        logger.warning(f"Malformed error response for {e.code.value}")
    click.echo(json.dumps(response), err=True)
    raise click.exceptions.Exit(e.exit_code)


def handle_errors(command):
    """Report IsotropyError as a JSON error response on stderr and exit with its status."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except IsotropyError as e:
            logger.error(f"{e.code.value}: {e.message}")
            _fail(e)

    return wrapper



def _config(ctx: click.Context) -> ConfigManager:
    return ctx.find_object(ConfigManager)


def _field(ctx: click.Context, value: Optional[str]) -> FieldSpec:
    return FieldSpec.parse(value or _config(ctx).get('defaults.field', 'rational'))


def _setting(ctx: click.Context, value, key: str, default):
    return value if value is not None else _config(ctx).get(key, default)


def _emit(text: str, out: Optional[str]):
    if out:
        write_file(out, text)
    else:
        click.echo(text, nl=False)


def _decompositions(paths: Sequence[str], bundled: Sequence[str], count: int) -> List[Decomposition]:
    """Bundled decompositions first, then files; exactly count of them."""
    decompositions = [load_bundled(name) for name in bundled]
    decompositions += [read_file(path, parse_decomposition) for path in paths]
    if len(decompositions) != count:
        raise click.UsageError(f"Expected {count} decomposition(s) from files and --bundled, got {len(decompositions)}")
    return decompositions


def _over(d: Decomposition, field: Optional[FieldSpec]) -> Decomposition:
    if field is None or field == d.field:
        return d
    return decomposition_over(d, field)


def _report(ok: bool, true_text: str, false_text: str):
    click.echo(true_text if ok else false_text)
    if not ok:
        raise click.exceptions.Exit(1)


field_option = click.option('--field', 'field_text', default=None,
                            help='rational or gf:<q> (default from configuration).')
out_option = click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None,
                          help='Write the result here instead of standard output.')
budget_option = click.option('--budget', type=click.IntRange(min=1), default=None,
                             help='Maximum number of raw GL triples to enumerate.')
workers_option = click.option('--workers', type=click.IntRange(min=1), default=None,
                              help='Threads used by the enumeration.')
mode_option = click.option('--mode', type=click.Choice([m.value for m in GroupMode]), default=GroupMode.FULL.value,
                           show_default=True, help='small: factor-preserving elements only.')
bundled_option = click.option('--bundled', multiple=True, type=click.Choice(BUNDLED),
                              help='Use a shipped decomposition of <2,2,2> (repeatable).')


@click.group(name='mmt-isotropy')
@click.option('--config-env', type=click.Choice(ConfigManager.ENVIRONMENTS), default=None,
              help='Configuration environment (default: MMT_ENV or local).')
@click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None)
@click.pass_context
def cli(ctx: click.Context, config_env: Optional[str], log_level: Optional[str]):
    """Isotropy group of the matrix multiplication tensor <m, n, p>."""
    manager = ConfigManager()
    try:
        manager.load_config(config_env)
    except ConfigurationError as e:
        _fail(e)
    if log_level:
        manager.set('logging.level', log_level.upper())
    configure_logging(manager.config)
    ctx.obj = manager


@cli.command()
@click.argument('m', type=click.IntRange(min=1))
@click.argument('n', type=click.IntRange(min=1))
@click.argument('p', type=click.IntRange(min=1))
@field_option
@click.option('--random', 'random_', is_flag=True, help='Write a random tensor of the same shape instead.')
@click.option('--seed', type=click.IntRange(min=0), default=None)
@out_option
@click.pass_context
@handle_errors
def gen(ctx, m, n, p, field_text, random_, seed, out):
    """Write the tensor <m, n, p>."""
    shape, field = Shape(m, n, p), _field(ctx, field_text)
    if random_:
        rng = np.random.default_rng(_setting(ctx, seed, 'defaults.seed', 0))
        tensor = random_tensor(shape, field, rng)
    else:
        tensor = build_mmt(shape, field)
    _emit(format_tensor(tensor), out)


@cli.command(name='apply')
@click.argument('element_file', type=EXISTING_FILE)
@click.argument('tensor_file', type=EXISTING_FILE)
@out_option
@handle_errors
def apply_cmd(element_file, tensor_file, out):
    """Apply an isotropy element to a tensor."""
    g = read_file(element_file, parse_element)
    s = read_file(tensor_file, parse_tensor)
    _emit(format_tensor(apply(g, s)), out)


@cli.command()
@click.argument('element_file', type=EXISTING_FILE)
@click.argument('tensor_file', type=EXISTING_FILE)
@handle_errors
def check(element_file, tensor_file):
    """Exit 0 iff the element fixes the tensor."""
    g = read_file(element_file, parse_element)
    s = read_file(tensor_file, parse_tensor)
    _report(is_isotropy(g, s), "fixed", "not fixed")


@cli.command(name='compose')
@click.argument('first', type=EXISTING_FILE)
@click.argument('second', type=EXISTING_FILE)
@out_option
@handle_errors
def compose_cmd(first, second, out):
    """Write first o second (second acts first), normalized."""
    g = read_file(first, parse_element)
    h = read_file(second, parse_element)
    _emit(format_element(compose(g, h)), out)


@cli.command(name='invert')
@click.argument('element_file', type=EXISTING_FILE)
@out_option
@handle_errors
def invert_cmd(element_file, out):
    _emit(format_element(invert(read_file(element_file, parse_element))), out)


@cli.command(name='normalize')
@click.argument('element_file', type=EXISTING_FILE)
@out_option
@handle_errors
def normalize_cmd(element_file, out):
    _emit(format_element(normalize(read_file(element_file, parse_element))), out)


@cli.command()
@click.argument('first', type=EXISTING_FILE)
@click.argument('second', type=EXISTING_FILE)
@handle_errors
def equal(first, second):
    """Exit 0 iff the two elements agree up to factor scalars."""
    g = read_file(first, parse_element)
    h = read_file(second, parse_element)
    _report(equal_mod_scalars(g, h), "equal", "not equal")


@cli.command()
@click.argument('perm', type=click.Choice([pi.value for pi in Perm3]))
@click.argument('m', type=click.IntRange(min=1))
@click.argument('n', type=click.IntRange(min=1))
@click.argument('p', type=click.IntRange(min=1))
@field_option
@out_option
@click.pass_context
@handle_errors
def rho(ctx, perm, m, n, p, field_text, out):
    """Write the transpose-and-permute element inducing PERM."""
    _emit(format_element(rho_element(Perm3(perm), Shape(m, n, p), _field(ctx, field_text))), out)


@cli.command()
@click.argument('a_file', type=EXISTING_FILE)
@click.argument('b_file', type=EXISTING_FILE)
@click.argument('c_file', type=EXISTING_FILE)
@click.option('--kind', type=click.Choice(['decomposable', 'multiplicative']), default='decomposable',
              show_default=True,
              help='decomposable: maps of M_mn, M_np, M_pm fixing <m,n,p>. '
                   'multiplicative: maps of M_nm, M_pn, M_pm with B(y)A(x) = C(yx).')
@out_option
@handle_errors
def recover(a_file, b_file, c_file, kind, out):
    """Recover T(a, b, c) from three linear maps."""
    maps = tuple(read_file(path, parse_linmap) for path in (a_file, b_file, c_file))
    if kind == 'decomposable':
        (m, n), (_, p) = maps[0].domain, maps[1].domain
        g = recover_small_element(maps, Shape(m, n, p))
    else:
        g = gamma_from_delta(*maps).element
        if g is None:
            raise NotMultiplicative("The maps do not satisfy B(y)A(x) = C(yx)")
    _emit(format_element(g), out)


@cli.command(name='structure-tensor')
@click.argument('bilinear_file', type=EXISTING_FILE)
@click.option('--shape', 'shape_', nargs=3, type=click.IntRange(min=1), required=True,
              help='Read the map as M_nm x M_pn -> M_pm for this (m, n, p).')
@out_option
@handle_errors
def structure_tensor_cmd(bilinear_file, shape_, out):
    """Write the structure tensor of a bilinear map as a tensor file."""
    m, n, p = shape_
    f = read_file(bilinear_file, parse_bilinear).with_shapes((n, m), (p, n), (p, m))
    _emit(format_tensor(structure_tensor(f).to_tensor3()), out)


@cli.command(name='stabilizer')
@click.argument('decomposition_file', type=EXISTING_FILE, required=False)
@bundled_option
@field_option
@mode_option
@budget_option
@workers_option
@out_option
@click.pass_context
@handle_errors
def stabilizer_cmd(ctx, decomposition_file, bundled, field_text, mode, budget, workers, out):
    """Enumerate the symmetry group of a decomposition over GF(q)."""
    paths = [decomposition_file] if decomposition_file else []
    d = _decompositions(paths, bundled, 1)[0]
    d = _over(d, FieldSpec.parse(field_text) if field_text else None)
    result = stabilizer(d, d.field, GroupMode(mode),
                        _setting(ctx, budget, 'defaults.budget', 10 ** 8),
                        _setting(ctx, workers, 'defaults.workers', 1))
    click.echo(f"order {result.order}, closed under compose and invert: {result.closed}", err=True)
    _emit(format_stabilizer(result), out)


@cli.command(name='orbit-equal')
@click.argument('decomposition_files', nargs=-1, type=EXISTING_FILE)
@bundled_option
@field_option
@mode_option
@budget_option
@out_option
@click.pass_context
@handle_errors
def orbit_equal(ctx, decomposition_files, bundled, field_text, mode, budget, out):
    """Find g with g . D1 = D2; exit 1 if the group holds none."""
    field = FieldSpec.parse(field_text) if field_text else None
    d1, d2 = (_over(d, field) for d in _decompositions(decomposition_files, bundled, 2))
    g = orbit_equivalent(d1, d2, d1.field, GroupMode(mode), _setting(ctx, budget, 'defaults.budget', 10 ** 8))
    if g is None:
        click.echo("not equivalent")
        raise click.exceptions.Exit(1)
    _emit(format_element(g), out)


@cli.command(name='enumerate')
@click.argument('m', type=click.IntRange(min=1))
@click.argument('n', type=click.IntRange(min=1))
@click.argument('p', type=click.IntRange(min=1))
@field_option
@mode_option
@budget_option
@click.option('--list', 'list_elements', is_flag=True, help='Also stream every element.')
@out_option
@click.pass_context
@handle_errors
def enumerate_cmd(ctx, m, n, p, field_text, mode, budget, list_elements, out):
    """Count (and optionally list) the isotropy group over GF(q)."""
    shape, field = Shape(m, n, p), _field(ctx, field_text)
    budget = _setting(ctx, budget, 'defaults.budget', 10 ** 8)
    order = group_order(shape, field, budget)
    click.echo(f"raw_triples {order.raw_triples}")
    click.echo(f"small {order.small}")
    click.echo(f"full {order.full}")
    click.echo(f"permutations {order.permutations}")
    click.echo(f"formula_small {order.formula_small}")
    if list_elements:
        text = "".join(format_element(g) for g in iter_group(shape, field, GroupMode(mode), budget))
        _emit(text, out)


@cli.command(name='verify-suite')
@click.option('--shape', 'shapes', nargs=3, type=click.IntRange(min=1), multiple=True,
              help='Shape for the invariance check (repeatable).')
@click.option('--field', 'field_texts', multiple=True, help='Field for the sampled checks (repeatable).')
@click.option('--samples', type=click.IntRange(min=0), default=None)
@click.option('--seed', type=click.IntRange(min=0), default=None)
@workers_option
@click.option('--check', 'names', multiple=True, type=click.Choice([name for name, _ in CHECKS]),
              help='Run only this check (repeatable).')
@click.pass_context
@handle_errors
def verify_suite(ctx, shapes: Tuple[Tuple[int, int, int], ...], field_texts, samples, seed, workers, names):
    """Run the property checks; exit 1 if any fails."""
    shape_list = [Shape(*s) for s in (shapes or _config(ctx).get('suite.shapes', [[2, 2, 2]]))]
    fields = [FieldSpec.parse(text) for text in (field_texts or _config(ctx).get('suite.fields', ['rational']))]
    results = run_suite(
        shape_list,
        fields,
        _setting(ctx, samples, 'suite.samples', 20),
        _setting(ctx, seed, 'defaults.seed', 0),
        _setting(ctx, workers, 'defaults.workers', 1),
        names,
    )
    for result in results:
        click.echo(result.line())
    passed = sum(1 for r in results if r.passed)
    click.echo(f"Results: {passed}/{len(results)} checks passed")
    logger.info(f"verify-suite finished: {passed}/{len(results)} passed")
    if passed != len(results):
        raise click.exceptions.Exit(1)


def main():
    cli(prog_name='mmt-isotropy')


if __name__ == '__main__':
    main()

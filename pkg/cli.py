"""
Command-line interface for the routecog route-choice simulator.
"""

import logging
import statistics
import sys
from pathlib import Path

import click

from routecog import __version__
from routecog.artifacts import compare_csv, write_run, write_text_atomic
from routecog.assignment import run_assignment
from routecog.choice import ChoiceParams, choice_probabilities, kirchhoff_probabilities, logit_probabilities, utilities
from routecog.cognition import FeatureLibrary
from routecog.config import SimulationConfig, load_config
from routecog.costs import price_edges, route_general_cost
from routecog.demand import fixture_od, read_od, write_od
from routecog.errors import InputError
from routecog.network import fixture_network, parse_network, read_network, serialize_network, validate_network
from routecog.routing import RouteQuery, k_shortest_routes

EXIT_INPUT_ERROR = 1
EXIT_INTERNAL_ERROR = 2


class RoutecogGroup(click.Group):
    """Maps failures to exit codes: 1 for bad input, 2 for anything else."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            result = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
            code = result if isinstance(result, int) else 0
        except click.exceptions.Exit as e:
            code = e.exit_code
        except click.ClickException as e:
            e.show()
            code = EXIT_INPUT_ERROR
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = EXIT_INPUT_ERROR
        except InputError as e:
            click.echo(f"❌ Error: {e}", err=True)
            code = EXIT_INPUT_ERROR
        except Exception as e:
            click.echo(f"❌ Error: internal failure: {e}", err=True)
            code = EXIT_INTERNAL_ERROR
        if standalone_mode:
            sys.exit(code)
        return code


def _network(path):
    return read_network(path) if path else fixture_network()


def _od(path):
    return read_od(path) if path else fixture_od()


def _config(config_path, **overrides):
    config = load_config(config_path) if config_path else SimulationConfig()
    return config.with_overrides(**overrides)


def _costs(text):
    try:
        return [float(value) for value in text.split(",")]
    except ValueError:
        raise click.BadParameter(f"'{text}' is not a comma-separated list of numbers", param_hint="--costs")


def _fmt(values):
    return ", ".join(f"{value:.6f}" for value in values)


network_option = click.option('--network', 'network_path', type=click.Path(exists=True, dir_okay=False),
                              help='Network JSON document (default: bundled 12-zone fixture)')
od_option = click.option('--od', 'od_path', type=click.Path(exists=True, dir_okay=False),
                         help='OD matrix file (default: bundled flat-time table)')


def run_options(command):
    """Options shared by run and compare."""
    options = [
        network_option,
        od_option,
        click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
                     help='Run configuration JSON (flags win on conflict)'),
        click.option('--mode', type=click.Choice(['flat', 'peak']), help='Demand regime (default: flat)'),
        click.option('--model', type=click.Choice(['logit', 'kirchhoff']), help='Choice model (default: kirchhoff)'),
        click.option('--sensitivity', type=float, help='mu for logit, k for kirchhoff (default: 3.0)'),
        click.option('--k-routes', type=click.IntRange(min=1), help='Candidate routes per OD pair (default: 5)'),
        click.option('--seed', type=click.IntRange(min=0, max=2**64 - 1), help='Random seed (default: 42)'),
        click.option('--epsilon', type=float, help='Convergence threshold (default: 0.001)'),
        click.option('--averaging', type=click.Choice(['none', 'successive']), help='Volume blending (default: successive)'),
    ]
    for option in reversed(options):
        command = option(command)
    return command


@click.group(cls=RoutecogGroup)
@click.version_option(__version__, prog_name='routecog')
@click.option('-v', '--verbose', is_flag=True, help='Log iteration details')
def main(verbose):
    """
    Route-choice assignment simulator.

    Examples:

    python cli.py run --out results

    python cli.py choice --costs 5,10 --sensitivity 1 --model kirchhoff

    python cli.py routes --from Z1 --to Z11 -k 3
    """
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')


@main.command()
@run_options
@click.option('--cognition', type=click.Choice(['on', 'off']), help='Driver feature library (default: on)')
@click.option('--max-iter', 'max_iterations', type=click.IntRange(min=1), help='Iteration cap (default: 100)')
@click.option('--library-in', type=click.Path(exists=True, dir_okay=False), help='Feature library exported by an earlier run')
@click.option('--out', 'out_dir', default='out', show_default=True, type=click.Path(file_okay=False),
              help='Directory for iterations.csv, flows.csv, library.json')
def run(network_path, od_path, config_path, mode, model, sensitivity, k_routes, seed, epsilon, averaging,
        cognition, max_iterations, library_in, out_dir):
    """Run the assignment and write its result files."""
    network = _network(network_path)
    od = _od(od_path)
    config = _config(config_path, mode=mode, model=model, sensitivity=sensitivity, k_routes=k_routes,
                     seed=seed, epsilon=epsilon, averaging=averaging, max_iterations=max_iterations,
                     cognition=None if cognition is None else cognition == 'on')
    library = None
    if library_in:
        library = FeatureLibrary.from_json(Path(library_in).read_text(encoding='utf-8'), network)

    result = run_assignment(network, od, config, library=library)
    paths = write_run(out_dir, result, od)

    last = result.reports[-1]
    status = "converged" if last.converged else "not converged"
    click.echo(f"\n✅ {len(result.reports)} iterations, {status}")
    click.echo(f"   • Average travel cost: {last.average_travel_cost:.4f}")
    click.echo(f"   • Cost variance: {last.cost_variance:.4f}")
    click.echo(f"   • Cache hit rate: {last.cache_hit_rate:.3f}")
    click.echo(f"   • Library entries: {len(result.library)}")
    for path in paths:
        click.echo(f"📄 {path}")


@main.command()
@network_option
def validate(network_path):
    """Print network diagnostics; exit 1 if there are any."""
    if network_path:
        network = parse_network(Path(network_path).read_text(encoding='utf-8'))
    else:
        network = fixture_network()
    diagnostics = validate_network(network)
    for diagnostic in diagnostics:
        click.echo(f"❌ {diagnostic}")
    if diagnostics:
        click.echo(f"{len(diagnostics)} diagnostic(s)", err=True)
        return EXIT_INPUT_ERROR
    click.echo(f"✅ Network valid: {len(network.zones)} zones, {len(network.nodes)} nodes, "
               f"{len(network.links)} links, {len(network.edges)} edges")
    return 0


@main.command()
@network_option
@click.option('--from', 'origin', required=True, help='Origin zone id (e.g. Z1)')
@click.option('--to', 'dest', required=True, help='Destination zone id (e.g. Z11)')
@click.option('-k', '--k-routes', default=5, show_default=True, type=click.IntRange(min=1))
@click.option('--class', 'driver_class', default='default', show_default=True, help='Driver class whose weights price the routes')
@click.option('--model', default='kirchhoff', show_default=True, type=click.Choice(['logit', 'kirchhoff']))
@click.option('--sensitivity', default=3.0, show_default=True, type=float)
def routes(network_path, origin, dest, k_routes, driver_class, model, sensitivity):
    """Print the free-flow priced route set of one OD pair."""
    network = _network(network_path)
    config = SimulationConfig()
    params = ChoiceParams(model, sensitivity)
    costs = price_edges(network, config.weights_for(driver_class))
    found = k_shortest_routes(network, RouteQuery(origin, dest, k_routes, costs))
    route_costs = [route_general_cost(route, costs) for route in found]
    probabilities = choice_probabilities(route_costs, params)
    click.echo(f"\n📋 {origin} → {dest} ({len(found)} routes, {model} {sensitivity:g})")
    for rank, (route, cost, p) in enumerate(zip(found, route_costs, probabilities), 1):
        click.echo(f"{rank}. cost {cost:.4f}  p={p:.6f}")
        click.echo(f"   {route}")


@main.command()
@click.option('--costs', 'costs_text', required=True, help='Comma-separated route general costs (e.g. 5,10)')
@click.option('--sensitivity', default=3.0, show_default=True, type=float, help='mu for logit, k for kirchhoff')
@click.option('--model', type=click.Choice(['logit', 'kirchhoff']), help='Print only this model')
def choice(costs_text, sensitivity, model):
    """Print Logit and Kirchhoff probabilities for a list of route costs."""
    values = utilities(_costs(costs_text))
    if model in (None, 'logit'):
        click.echo(f"logit: {_fmt(logit_probabilities(values, sensitivity))}")
    if model in (None, 'kirchhoff'):
        click.echo(f"kirchhoff: {_fmt(kirchhoff_probabilities(values, sensitivity))}")


@main.command()
@run_options
@click.option('--iterations', default=50, show_default=True, type=click.IntRange(min=1),
              help='Iterations per arm (no early stop)')
@click.option('--out', 'out_dir', default='out', show_default=True, type=click.Path(file_okay=False),
              help='Directory for compare.csv')
def compare(network_path, od_path, config_path, mode, model, sensitivity, k_routes, seed, epsilon, averaging,
            iterations, out_dir):
    """Run cognition on and off with one shared configuration."""
    network = _network(network_path)
    od = _od(od_path)
    config = _config(config_path, mode=mode, model=model, sensitivity=sensitivity, k_routes=k_routes,
                     seed=seed, epsilon=epsilon, averaging=averaging, max_iterations=iterations,
                     stop_on_convergence=False)
    on = run_assignment(network, od, config.with_overrides(cognition=True)).reports
    off = run_assignment(network, od, config.with_overrides(cognition=False)).reports
    path = write_text_atomic(Path(out_dir) / 'compare.csv', compare_csv(on, off))

    click.echo(f"\n📋 Cognition on vs off ({iterations} iterations, seed {config.seed})")
    click.echo(f"{'':24}{'on':>14}{'off':>14}")
    rows = [
        ("mean avg travel cost", [r.average_travel_cost for r in on], [r.average_travel_cost for r in off]),
        ("mean cost variance", [r.cost_variance for r in on], [r.cost_variance for r in off]),
        ("mean route search ms", [r.route_search_time * 1000 for r in on], [r.route_search_time * 1000 for r in off]),
        ("mean cache hit rate", [r.cache_hit_rate for r in on], [r.cache_hit_rate for r in off]),
    ]
    for label, a, b in rows:
        click.echo(f"{label:24}{statistics.fmean(a):>14.4f}{statistics.fmean(b):>14.4f}")
    click.echo(f"📄 {path}")


@main.command()
@click.option('--out', 'out_dir', required=True, type=click.Path(file_okay=False), help='Target directory')
def fixture(out_dir):
    """Write the bundled network and OD documents in canonical form."""
    out = Path(out_dir)
    for path in (write_text_atomic(out / 'network.json', serialize_network(fixture_network())),
                 write_text_atomic(out / 'table1.od', write_od(fixture_od()))):
        click.echo(f"📄 {path}")


if __name__ == '__main__':
    main()

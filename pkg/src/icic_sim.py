#!/usr/bin/env python3
"""
Command line front end for the UAV sensing-assisted ICIC simulator
"""
import json
import logging
import time

import click
import psutil

from src.channel import ChannelMode
from src.datastore import ExperimentDatastore, emit_csv
from src.errors import IcicError
from src.experiment_config import PRESET_NAMES, load_config
from src.experiment_runner import ExperimentRunner, draw_snapshot


def default_workers():
    return psutil.cpu_count(logical=False) or 1


def _load(config_file, preset, **overrides):
    try:
        return load_config(config_file=config_file, preset=preset, **overrides)
    except (IcicError, OSError) as e:
        raise click.ClickException(str(e)) from e


def _echo_config(config, workers):
    click.echo(f"Schemes: {', '.join(config.schemes)}")
    click.echo(f"Realizations: {config.realizations}, seed: {config.master_seed}, mode: {config.mode}")
    click.echo(f"Grid: {config.tiers} tiers, R_c={config.cell_radius_m:g} m, "
               f"H_B={config.bs_height_m:g} m, H_u={config.uav_altitude_m:g} m")
    click.echo(f"RBs: {config.n_rbs}, terrestrial UEs: {config.n_ues}, q={config.q}, workers: {workers}")


@click.group()
@click.option('-v', '--verbose', is_flag=True, help='Enable debug logging')
def cli(verbose):
    """UAV sensing-assisted inter-cell interference coordination simulator"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(asctime)s - %(levelname)s - %(message)s',
    )


@cli.command()
@click.option('--config', 'config_file', type=click.Path(exists=True, dir_okay=False), help='JSON config file')
@click.option('--preset', type=click.Choice(PRESET_NAMES), help='Experiment preset')
@click.option('--seed', type=int, help='Master seed')
@click.option('-o', '--out', default='experiment_results.csv', show_default=True, help='Output CSV file')
@click.option('--mode', type=click.Choice([m.value for m in ChannelMode]), help='Channel mode')
@click.option('-n', '--realizations', type=int, help='Number of Monte Carlo realizations')
@click.option('-w', '--workers', type=int, default=None, help='Worker processes (default: physical cores)')
@click.option('--records', type=click.Path(dir_okay=False), help='Also write per-realization records to this CSV')
@click.option('-q', '--quiet', is_flag=True, help='Hide the progress bar')
def run(config_file, preset, seed, out, mode, realizations, workers, records, quiet):
    """
    Run a Monte Carlo experiment and write the aggregated results as CSV

    Settings apply in order: defaults, preset, config file, command line flags.

    Examples:
        icic-sim run --preset fig3a -o fig3a.csv
        icic-sim run --preset fig3b --mode pure-los -n 200 -w 4
        icic-sim run --config my_experiment.json --seed 7 --records realizations.csv
    """
    config = _load(config_file, preset, master_seed=seed, mode=mode, realizations=realizations)
    workers = workers or default_workers()

    click.echo(f"=== Experiment {preset or config_file or 'defaults'} ===")
    _echo_config(config, workers)

    start = time.time()
    runner = ExperimentRunner(config, workers=workers, progress=not quiet)
    try:
        rows = runner.run()
        emit_csv(rows, out)
        if records:
            ExperimentDatastore(records).save_records(runner.records)
    except (IcicError, OSError) as e:
        click.echo(f"❌ Experiment failed: {e}")
        raise click.ClickException(str(e)) from e

    click.echo(f"✅ {len(rows)} result rows → {out} ({time.time() - start:.1f} s)")
    if records:
        click.echo(f"✅ Realization records → {records}")


@cli.command('validate-config')
@click.argument('config_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--preset', type=click.Choice(PRESET_NAMES), help='Preset the file is layered on')
def validate_config(config_file, preset):
    """
    Check a JSON config file without running anything

    Examples:
        icic-sim validate-config my_experiment.json
    """
    config = _load(config_file, preset)
    click.echo(f"✅ {config_file} is valid")
    _echo_config(config, default_workers())


@cli.command('dump-scenario')
@click.option('--config', 'config_file', type=click.Path(exists=True, dir_okay=False), help='JSON config file')
@click.option('--preset', type=click.Choice(PRESET_NAMES), help='Experiment preset')
@click.option('--seed', type=int, help='Master seed')
@click.option('--index', type=int, default=0, show_default=True, help='Realization index')
@click.option('-o', '--out', type=click.Path(dir_okay=False), help='Write JSON here instead of stdout')
def dump_scenario(config_file, preset, seed, index, out):
    """
    Print the network snapshot of one realization as JSON

    Examples:
        icic-sim dump-scenario --seed 2020 --index 3
        icic-sim dump-scenario --preset fig3c --index 0 -o snapshot.json
    """
    config = _load(config_file, preset, master_seed=seed)
    try:
        scenario, _ = draw_snapshot(config, index)
    except IcicError as e:
        raise click.ClickException(str(e)) from e

    text = json.dumps(scenario.to_dict(), indent=2)
    if out:
        with open(out, 'w') as f:
            f.write(text + "\n")
        click.echo(f"✅ Scenario {index} → {out}")
    else:
        click.echo(text)


main = cli

if __name__ == "__main__":
    main()

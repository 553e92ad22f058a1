"""Scenario builders and runners, one pair per scenario kind.

``prepare(kind, params, options)`` turns a parameter block into domain
objects and raises before any computation if the block is invalid.
``execute(prepared, out_dir, seed)`` does the work, writes artifacts into
``out_dir`` and returns the headline numbers for ``summary.json``.
"""

import csv
import dataclasses
import json
import math

import numpy as np

from ..dynamics import simulate_attitude, simulate_hop
from ..errors import ConfigError, DomainError, StepSizeError, ValidationError
from ..mission import (
    REFERENCE_LENGTHS,
    REFERENCE_RESOLUTIONS,
    plan_survey,
    reference_table_rows,
    robots_required,
    simulate_relay,
)
from ..navigation import SphereWorld, multi_start, plan_path, potential_grid
from ..propulsion import hover_flight_time, ideal_isp, load_propellants, simulate_solid_burn
from ..propulsion.solid import MAX_WEB_FRACTION_PER_STEP
from .config import (
    Builder,
    build_camera,
    build_cave,
    build_motor,
    build_plan,
    build_relay_chain,
    build_state,
    build_vehicle,
    build_world,
)

PAPER_START = (0.6, 0.73)
ATTITUDE_TARGET = (0.27, 0.25, 0.07)


def _plain(value):
    """Convert numpy scalars/arrays and non-finite floats for JSON."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_json(path, data):
    with open(path, "w") as fh:
        json.dump(_plain(data), fh, sort_keys=True, indent=2, allow_nan=False)
        fh.write("\n")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _rel(value, ref):
    return None if ref in (None, 0) else (value - ref) / ref


# --- motor-burn -------------------------------------------------------------

def prepare_motor_burn(b, params, options):
    b.check_keys(params, "params", {"motor", "dt"})
    motor = build_motor(b, params.get("motor", {}))
    dt = b.number(params, "dt", "params", 1e-4)
    b.require(dt > 0, f"params.dt must be > 0, got {dt!r}")
    if motor is not None and dt > 0 and motor.web_thickness > 0:
        peak = motor.burn_rate(motor.chamber_pressure(motor.grain_outer_radius))
        b.require(peak * dt < MAX_WEB_FRACTION_PER_STEP * motor.web_thickness,
                  f"params.dt={dt!r} s burns more than {MAX_WEB_FRACTION_PER_STEP:.0%} of the web "
                  f"per step; use dt < {MAX_WEB_FRACTION_PER_STEP * motor.web_thickness / peak:.3g} s")
    return {"motor": motor, "dt": dt}


def run_motor_burn(prep, out, seed):
    motor = prep["motor"]
    profile = simulate_solid_burn(motor, prep["dt"])
    profile.to_csv(out / "burn.csv")
    burning = profile.chamber_pressure[:-1] if len(profile) > 1 else profile.chamber_pressure
    consumed = profile.integrated_mass_flow()
    return {
        "samples": len(profile),
        "burnout_time_s": profile.burnout_time,
        "initial_chamber_pressure_pa": profile.chamber_pressure[0],
        "peak_chamber_pressure_pa": float(np.max(profile.chamber_pressure)),
        "pressure_monotone_until_burnout": bool(np.all(np.diff(burning) >= 0)),
        "peak_thrust_n": float(np.max(profile.thrust)),
        "total_impulse_ns": profile.total_impulse(),
        "propellant_mass_kg": motor.propellant_mass,
        "integrated_mass_flow_kg": consumed,
        "mass_balance_defect": (abs(consumed - motor.propellant_mass) / motor.propellant_mass
                                if motor.propellant_mass > 0 else 0.0),
        "burn_rate_coefficient": motor.burn_rate_coefficient,
        "expansion_ratio": motor.expansion_ratio,
    }


# --- isp-table / tables -----------------------------------------------------

ISP_COLUMNS = ("name", "category", "molecular_weight", "combustion_temperature", "gamma",
               "isp_s", "reference_isp_s", "isp_relative_error",
               "flight_time_s", "reference_flight_time_s", "flight_time_relative_error",
               "flight_time_ideal_isp_s")


def _prepare_isp(b, params, allowed_extra=()):
    allowed = {"propellants_file", "chamber_pressure", "exit_pressure", "gamma",
               "initial_mass", "propellant_mass", "gravity", "categories"} | set(allowed_extra)
    b.check_keys(params, "params", allowed)
    path = params.get("propellants_file")
    try:
        props = load_propellants(path)
    except OSError as exc:
        raise ConfigError(f"params.propellants_file: cannot read {path!r}") from exc
    except (TypeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"params.propellants_file: malformed propellant records ({exc})") from exc
    except ValidationError as exc:
        b.problems.extend(f"params.propellants_file: {p}" for p in exc.problems)
        props = []
    prep = {k: b.number(params, k, "params", d) for k, d in (
        ("chamber_pressure", 2.0e6), ("exit_pressure", 600.0), ("initial_mass", 3.0),
        ("propellant_mass", 1.095), ("gravity", 3.71))}
    if "gamma" in params:
        gamma = b.number(params, "gamma", "params", None)
        b.require(1.0 < gamma < 2.0, f"params.gamma must lie in (1, 2), got {gamma!r}")
        if 1.0 < gamma < 2.0:
            props = [dataclasses.replace(p, gamma=gamma) for p in props]
    cats = params.get("categories")
    if cats is not None:
        if not isinstance(cats, list) or not all(isinstance(c, str) for c in cats):
            raise ConfigError("params.categories: expected a list of strings")
        props = [p for p in props if p.category in cats]
    b.require(prep["chamber_pressure"] > 0, "params.chamber_pressure must be > 0")
    b.require(0 < prep["exit_pressure"] < prep["chamber_pressure"],
              "params.exit_pressure must lie in (0, chamber_pressure)")
    b.require(0 < prep["propellant_mass"] < prep["initial_mass"],
              "params.propellant_mass must lie in (0, initial_mass)")
    b.require(prep["gravity"] > 0, "params.gravity must be > 0")
    prep["propellants"] = props
    return prep


def _isp_rows(prep, props):
    for p in props:
        isp = ideal_isp(p, prep["chamber_pressure"], prep["exit_pressure"])
        args = (prep["initial_mass"], prep["propellant_mass"], prep["gravity"])
        ft_ref = hover_flight_time(p.reference_isp, *args) if p.reference_isp else None
        ft_ideal = hover_flight_time(isp, *args)
        yield (p.name, p.category, p.molecular_weight, p.combustion_temperature, p.gamma,
               isp, p.reference_isp, _rel(isp, p.reference_isp),
               ft_ref, p.reference_flight_time,
               None if ft_ref is None else _rel(ft_ref, p.reference_flight_time),
               ft_ideal)


def _isp_summary(rows):
    isp_err = [abs(r[7]) for r in rows if r[7] is not None]
    ft_err = [abs(r[10]) for r in rows if r[10] is not None]
    return {
        "rows": len(rows),
        "max_abs_isp_relative_error": max(isp_err, default=None),
        "max_abs_flight_time_relative_error": max(ft_err, default=None),
        "isp_s": {r[0]: r[5] for r in rows},
        "flight_time_s": {r[0]: r[8] for r in rows},
    }


def prepare_isp_table(b, params, options):
    return _prepare_isp(b, params)


def run_isp_table(prep, out, seed):
    rows = list(_isp_rows(prep, prep["propellants"]))
    write_csv(out / "isp_table.csv", ISP_COLUMNS, rows)
    summary = _isp_summary(rows)
    summary["mass_ratio_log"] = math.log(prep["initial_mass"]
                                         / (prep["initial_mass"] - prep["propellant_mass"]))
    return summary


SURVEY_TABLE_COLUMNS = ("resolution", "camera_range_m", "cave_length_m", "robots",
                        "map_time_min", "paper_time_min", "relative_error")


def prepare_tables(b, params, options):
    prep = _prepare_isp(b, params, allowed_extra=("which", "camera", "t_h1", "t_h2",
                                                  "include_hop_count"))
    which = options.get("which") or params.get("which") or [2, 3, 4]
    if isinstance(which, int):
        which = [which]
    if not isinstance(which, list) or not set(which) <= {2, 3, 4} or not which:
        raise ConfigError(f"params.which: expected a subset of [2, 3, 4], got {which!r}")
    prep["which"] = sorted(set(which))
    prep["camera"] = build_camera(b, params.get("camera", {}))
    prep["t_h1"] = b.number(params, "t_h1", "params", 1.35)
    prep["t_h2"] = b.number(params, "t_h2", "params", 0.125)
    b.require(prep["t_h1"] >= 0 and prep["t_h2"] >= 0, "params.t_h1 and params.t_h2 must be >= 0")
    inc = params.get("include_hop_count", False)
    if not isinstance(inc, bool):
        raise ConfigError("params.include_hop_count: expected true or false")
    prep["include_hop_count"] = inc
    return prep


def run_tables(prep, out, seed):
    summary = {"tables": prep["which"]}
    groups = {2: ("solid",), 3: ("bipropellant", "monopropellant")}
    for n in prep["which"]:
        if n in groups:
            rows = list(_isp_rows(prep, [p for p in prep["propellants"] if p.category in groups[n]]))
            write_csv(out / f"table{n}.csv", ISP_COLUMNS, rows)
            summary[f"table{n}"] = _isp_summary(rows)
        else:
            rows = list(reference_table_rows(prep["camera"], prep["t_h1"], prep["t_h2"],
                                             prep["include_hop_count"]))
            write_csv(out / "table4.csv", SURVEY_TABLE_COLUMNS,
                      ([r[c] for c in SURVEY_TABLE_COLUMNS] for r in rows))
            short = [r for r in rows if r["cave_length_m"] == REFERENCE_LENGTHS[0]]
            summary["table4"] = {
                "cells": len(rows),
                "max_abs_relative_error": max(abs(r["relative_error"]) for r in rows),
                "max_abs_error_shortest_cave_min": max(
                    abs(r["map_time_min"] - r["paper_time_min"]) for r in short),
                "camera_range_m": {str(r["resolution"]): r["camera_range_m"] for r in short},
                "robots": {str(int(d)): robots_required(d) for d in REFERENCE_LENGTHS},
                "t_h1_min": prep["t_h1"],
                "t_h2_min": prep["t_h2"],
            }
    return summary


# --- hop / attitude ---------------------------------------------------------

def _sim_step(b, params, key, default):
    value = b.number(params, key, "params", default)
    b.require(value > 0, f"params.{key} must be > 0, got {value!r}")
    return value


def prepare_hop(b, params, options):
    b.check_keys(params, "params", {"vehicle", "initial", "plan", "dt", "coast_dt", "max_time"},
                 required=("plan",))
    vehicle = build_vehicle(b, params.get("vehicle", {}))
    initial = build_state(b, params.get("initial", {}))
    plan = build_plan(b, params["plan"])
    if vehicle is not None and initial is not None and plan is not None:
        b.require(initial.mass > vehicle.dry_mass or plan.burn_duration == 0,
                  f"params.initial.mass ({initial.mass!r} kg) must exceed "
                  f"params.vehicle.dry_mass ({vehicle.dry_mass!r} kg)")
    return {"vehicle": vehicle, "initial": initial, "plan": plan,
            "dt": _sim_step(b, params, "dt", 1e-3),
            "coast_dt": _sim_step(b, params, "coast_dt", 1e-2),
            "max_time": _sim_step(b, params, "max_time", 600.0)}


def _constraint_violations(traj, vehicle):
    tau = np.abs(np.array(traj.wheel_torque))
    speeds = np.abs(traj.array("wheel_speeds"))
    return int(np.sum(tau > vehicle.wheel_max_torque * (1 + 1e-9))
               + np.sum(speeds > vehicle.wheel_max_speed * (1 + 1e-9)))


def run_hop(prep, out, seed):
    traj = simulate_hop(prep["initial"], prep["plan"], prep["vehicle"], dt=prep["dt"],
                        coast_dt=prep["coast_dt"], max_time=prep["max_time"])
    traj.to_csv(out / "trajectory.csv")
    pos = traj.array("position")
    start, end = pos[0], pos[-1]
    flight = (traj.touchdown_time - traj.liftoff_time
              if traj.touchdown_time is not None and traj.liftoff_time is not None else None)
    return {
        "samples": len(traj),
        "liftoff_time_s": traj.liftoff_time,
        "touchdown_time_s": traj.touchdown_time,
        "flight_time_s": flight,
        "apex_altitude_m": float(pos[:, 2].max() - start[2]),
        "downrange_m": float(np.hypot(*(end[:2] - start[:2]))),
        "landing_position_m": end,
        "final_euler_rad": traj.final.euler,
        "propellant_used_kg": prep["initial"].mass - traj.final.mass,
        "propellant_exhausted": traj.propellant_exhausted,
        "max_wheel_speed_rad_s": float(np.abs(traj.array("wheel_speeds")).max()),
        "constraint_violations": _constraint_violations(traj, prep["vehicle"]),
        "events": traj.events,
    }


def prepare_attitude(b, params, options):
    b.check_keys(params, "params", {"vehicle", "initial", "target_attitude", "target_rates",
                                    "duration", "dt", "tolerance", "rate_tolerance"})
    prep = {
        "vehicle": build_vehicle(b, params.get("vehicle", {})),
        "initial": build_state(b, params.get("initial", {})),
        "target": b.vector(params, "target_attitude", "params", 3, ATTITUDE_TARGET),
        "rates": b.vector(params, "target_rates", "params", 3, (0.0, 0.0, 0.0)),
        "duration": _sim_step(b, params, "duration", 15.0),
        "dt": _sim_step(b, params, "dt", 1e-3),
        "tolerance": _sim_step(b, params, "tolerance", 0.02),
        "rate_tolerance": _sim_step(b, params, "rate_tolerance", 1e-3),
    }
    b.require(bool(np.all(np.isfinite(prep["target"]))), "params.target_attitude must be finite")
    return prep


def run_attitude(prep, out, seed):
    traj = simulate_attitude(prep["initial"], prep["target"], prep["vehicle"], prep["duration"],
                             dt=prep["dt"], target_rates=prep["rates"])
    traj.to_csv(out / "attitude.csv")
    final = traj.final
    target = prep["target"]
    rel = np.abs(final.euler - target) / np.where(target != 0, np.abs(target), 1.0)
    rate = float(np.linalg.norm(final.body_rates))
    violations = _constraint_violations(traj, prep["vehicle"])
    return {
        "samples": len(traj),
        "final_time_s": traj.t[-1],
        "final_euler_rad": final.euler,
        "target_euler_rad": target,
        "max_relative_angle_error": float(rel.max()),
        "final_rate_norm_rad_s": rate,
        "max_wheel_torque_nm": float(np.abs(np.array(traj.wheel_torque)).max()),
        "max_wheel_speed_rad_s": float(np.abs(traj.array("wheel_speeds")).max()),
        "constraint_violations": violations,
        "converged": bool(rel.max() <= prep["tolerance"] and rate < prep["rate_tolerance"]
                          and violations == 0),
    }


# --- plan-path --------------------------------------------------------------

def prepare_plan_path(b, params, options):
    b.check_keys(params, "params", {"world", "start", "step", "tolerance", "max_iters",
                                    "grid_points", "multi_start"})
    if options.get("paper_world") or "world" not in params:
        world = SphereWorld.reference()
        if options.get("paper_world") and "world" in params:
            raise ConfigError("params.world: cannot be combined with --paper-world")
    else:
        world = build_world(b, params["world"])
    start = b.vector(params, "start", "params", 2, PAPER_START)
    prep = {
        "world": world,
        "start": start,
        "step": _sim_step(b, params, "step", 0.005),
        "tolerance": _sim_step(b, params, "tolerance", 0.01),
    }
    for key, default in (("max_iters", 5000), ("grid_points", 101), ("multi_start", 0)):
        value = params.get(key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"params.{key}: expected an integer, got {value!r}")
        prep[key] = value
    b.require(prep["max_iters"] >= 0, "params.max_iters must be >= 0")
    b.require(prep["grid_points"] >= 2, "params.grid_points must be >= 2")
    b.require(prep["multi_start"] >= 0, "params.multi_start must be >= 0")
    if world is not None:
        b.require(world.is_free(start) and min(world.obstacle_factors(start), default=1) > 0,
                  f"params.start {start.tolist()} is not in free space")
    return prep


def run_plan_path(prep, out, seed):
    world = prep["world"]
    kw = dict(step=prep["step"], tolerance=prep["tolerance"], max_iters=prep["max_iters"])
    n = prep["grid_points"]
    xs = np.linspace(-world.bound_radius, world.bound_radius, n)
    grid = potential_grid(world, xs, xs)
    write_csv(out / "contour.csv", ("x", "y", "phi"),
              ((x, y, None if math.isnan(grid[iy, ix]) else grid[iy, ix])
               for iy, y in enumerate(xs) for ix, x in enumerate(xs)))
    path = plan_path(prep["start"], world, **kw)
    write_csv(out / "path.csv", ("step", "x", "y", "phi", "clearance"), path.rows())
    summary = {
        "converged": path.converged,
        "message": path.message,
        "iterations": path.iterations,
        "min_clearance": path.closest_obstacle_clearance,
        "final_point": path.waypoints[-1],
        "kappa": world.kappa,
    }
    if prep["multi_start"]:
        results = multi_start(world, prep["multi_start"], seed=seed, **kw)
        write_csv(out / "multi_start.csv",
                  ("index", "start_x", "start_y", "converged", "iterations", "min_clearance"),
                  ((i, *r.waypoints[0], r.converged, r.iterations, r.closest_obstacle_clearance)
                   for i, r in enumerate(results)))
        summary["multi_start"] = {
            "runs": len(results),
            "converged": sum(r.converged for r in results),
            "max_iterations": max(r.iterations for r in results),
            "min_clearance": min(r.closest_obstacle_clearance for r in results),
        }
    return summary


# --- survey -----------------------------------------------------------------

def prepare_survey(b, params, options):
    b.check_keys(params, "params", {"cave", "camera", "resolutions", "t_h1", "t_h2",
                                    "include_hop_count"}, required=("cave",))
    res = params.get("resolutions", list(REFERENCE_RESOLUTIONS))
    if not isinstance(res, list) or not res or not all(
            isinstance(r, (int, float)) and not isinstance(r, bool) for r in res):
        raise ConfigError("params.resolutions: expected a non-empty list of numbers")
    for i, r in enumerate(res):
        b.require(r > 0, f"params.resolutions[{i}] must be > 0, got {r!r}")
    inc = params.get("include_hop_count", False)
    if not isinstance(inc, bool):
        raise ConfigError("params.include_hop_count: expected true or false")
    prep = {
        "cave": build_cave(b, params["cave"]),
        "camera": build_camera(b, params.get("camera", {})),
        "resolutions": [float(r) for r in res],
        "t_h1": b.number(params, "t_h1", "params", 1.35),
        "t_h2": b.number(params, "t_h2", "params", 0.125),
        "include_hop_count": inc,
    }
    b.require(prep["t_h1"] >= 0 and prep["t_h2"] >= 0, "params.t_h1 and params.t_h2 must be >= 0")
    return prep


def run_survey(prep, out, seed):
    plans = [plan_survey(prep["cave"], prep["camera"], r, prep["t_h1"], prep["t_h2"],
                         prep["include_hop_count"]) for r in prep["resolutions"]]
    cols = ("resolution", "camera_range_m", "cave_length_m", "robots", "transit_hops",
            "scan_stops", "map_time_min")
    write_csv(out / "survey.csv", cols,
              ((p.target_resolution, p.camera_range, prep["cave"].length, p.robots_required,
                p.transit_hops, p.scan_stops, p.mapping_time) for p in plans))
    return {
        "cave_length_m": prep["cave"].length,
        "robots": plans[0].robots_required,
        "map_time_min": {repr(p.target_resolution): p.mapping_time for p in plans},
        "camera_range_m": {repr(p.target_resolution): p.camera_range for p in plans},
    }


# --- relay ------------------------------------------------------------------

def prepare_relay(b, params, options):
    b.check_keys(params, "params", {"cave_length", "positions", "link_rate", "link_latency",
                                    "comm_range", "payload_bits", "source"})
    if "cave_length" in params and "positions" in params:
        raise ConfigError("params: give either 'cave_length' or 'positions', not both")
    chain = build_relay_chain(b, params)
    payload = params.get("payload_bits", 1.0e6)
    sizes = payload if isinstance(payload, list) else [payload]
    if not sizes or not all(isinstance(s, (int, float)) and not isinstance(s, bool) for s in sizes):
        raise ConfigError("params.payload_bits: expected a number or a non-empty list of numbers")
    for i, s in enumerate(sizes):
        b.require(s >= 0, f"params.payload_bits[{i}] must be >= 0, got {s!r}")
    source = params.get("source")
    if source is not None and (isinstance(source, bool) or not isinstance(source, int)):
        raise ConfigError("params.source: expected an integer node index")
    if chain is not None:
        if source is not None:
            b.require(0 < source < chain.node_count,
                      f"params.source must lie in [1, {chain.node_count - 1}], got {source!r}")
        gaps = np.diff(chain.positions)
        for i, gap in enumerate(gaps):
            b.require(gap <= chain.comm_range * (1 + 1e-12),
                      f"params.positions: gap between node {i} and node {i + 1} is {gap:.3f} m, "
                      f"exceeds comm_range {chain.comm_range:.3f} m")
    return {"chain": chain, "payload": sizes, "source": source}


def run_relay(prep, out, seed):
    result = simulate_relay(prep["chain"], prep["payload"], prep["source"])
    write_csv(out / "relay_timeline.csv", ("node", "message", "received_s", "transmitted_s"),
              ((n, k, rx, None if math.isnan(tx) else tx) for n, k, rx, tx in result.rows()))
    return {
        "nodes": prep["chain"].node_count,
        "hops": result.hops,
        "messages": len(prep["payload"]),
        "end_to_end_latency_s": result.end_to_end_latency,
        "deliveries_s": result.deliveries,
    }


RUNNERS = {
    "motor-burn": (prepare_motor_burn, run_motor_burn),
    "isp-table": (prepare_isp_table, run_isp_table),
    "tables": (prepare_tables, run_tables),
    "hop": (prepare_hop, run_hop),
    "attitude": (prepare_attitude, run_attitude),
    "plan-path": (prepare_plan_path, run_plan_path),
    "survey": (prepare_survey, run_survey),
    "relay": (prepare_relay, run_relay),
}

DEFAULT_PARAMS = {
    "hop": {"plan": {"burn_duration": 0.5, "target_attitude": [0.0, 0.3, 0.0], "slew_duration": 5.0}},
    "survey": {"cave": {"length": 1000.0}},
}


def prepare(kind, params, options=None):
    """Validate ``params`` for ``kind``; raises ConfigError or ValidationError."""
    b = Builder()
    prep_fn, _ = RUNNERS[kind]
    try:
        prep = prep_fn(b, params, options or {})
    except DomainError as exc:
        raise ValidationError(str(exc)) from exc
    b.finish()
    return prep


def execute(kind, prep, out, seed):
    _, run_fn = RUNNERS[kind]
    try:
        return run_fn(prep, out, seed)
    except StepSizeError as exc:
        raise ValidationError(str(exc)) from exc


"""Command-line workbench driver.

Subcommands cover the full experiment chain: collect raw logs, turn them
into datasets (pipeline), fit the model zoo (train), score one-step and
rollout accuracy (eval), compare the controllers on repositioning moves
(control), and run full maze navigations (maze). Every artifact lands
under the configured output directory, commands are deterministic given
the global seed, and reports embed the resolved config plus content
hashes of their inputs. Wall-clock timings go to a separate sidecar so
deterministic outputs stay byte-identical across reruns.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
import time
import zlib
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, load_config
from .control import (ClusterPair, CostConfig, LearnedDynamics,
                      NavigatorConfig, PdGains, learn_transition_clusters,
                      navigate_maze, run_repositioning)
from .core import (MissingPrerequisiteError, Trajectory, ValidationError,
                   angle_diff, wrap_angle)
from .core.io import (load_dataset, load_model_doc, load_trajectory,
                      load_transitions, save_dataset, save_model_doc,
                      save_trajectory, save_transitions)
from .core.state import BallState, FullState, PlatformState
from .gp import MODEL_KINDS, fit_model, model_from_doc, model_to_doc
from .physics import BasisConfig
from .rollout import (learning_curve, nrmse, rollout_batch,
                      rollout_npd_batch, select_gate_windows, window_matrix)
from .sim import MazeSimulator
from .sysid import (ExcitationConfig, arx_from_doc, build_datasets,
                    build_transition_data, fit_arx, generate_excitation,
                    process_trajectory, simulation_fit_percent)


def derive_seed(global_seed, name):
    """Stable per-component seed: global seed + a name hash.

    Streams are keyed by name, so adding a component never shifts the
    draws of an existing one.
    """
    return int(np.random.SeedSequence(
        (int(global_seed), zlib.crc32(name.encode()))).generate_state(1)[0])


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _hash_files(paths):
    return {p.name: _sha256(p) for p in sorted(paths)}


def _write_json(path, payload):
    Path(path).write_text(
        json.dumps(payload, indent=1, sort_keys=True) + "\n")


def _require_files(directory, pattern, producer):
    files = sorted(Path(directory).glob(pattern))
    if not files:
        raise MissingPrerequisiteError(
            f"no {pattern} files under {directory}; "
            f"run `tiltmaze {producer}` first")
    return files


def _require_file(path, producer):
    path = Path(path)
    if not path.exists():
        raise MissingPrerequisiteError(
            f"missing {path}; run `tiltmaze {producer}` first")
    return path


# -- collect ----------------------------------------------------------------------


def _record_trajectory(cfg, name, start_ring, duration):
    """Run the simulator under multisine excitation and log observations.

    The log is what a camera and the command stream give you: noisy ball
    and tilt angles, the true ring index, no velocities. The final sample
    has no following command, so its action is blank.
    """
    sim_cfg = cfg.sim_config()
    sample_rate = 1.0 / sim_cfg.dt
    exc = cfg.excitation
    u = generate_excitation(ExcitationConfig(
        n_waves=exc.n_waves, freq_range=(0.0, exc.freq_max),
        amplitude_scale=exc.amplitude_scale, duration=duration,
        sample_rate=sample_rate, seed=derive_seed(cfg.seed, f"{name}/excite")))
    sim = MazeSimulator(sim_cfg, seed=derive_seed(cfg.seed, f"{name}/sim"))
    rng = np.random.default_rng(derive_seed(cfg.seed, f"{name}/start"))
    theta0 = wrap_angle(rng.uniform(-np.pi, np.pi))
    sim.reset(FullState(ball=BallState(ring=start_ring, theta=theta0,
                                       theta_dot=0.0),
                        platform=PlatformState()))
    n = len(u)
    theta = np.empty(n)
    beta = np.empty(n)
    gamma = np.empty(n)
    ring = np.empty(n, dtype=int)
    nan = np.full(n, np.nan)
    for k in range(n):
        obs = sim.observe()
        theta[k] = obs.ball.theta
        beta[k] = obs.platform.beta
        gamma[k] = obs.platform.gamma
        ring[k] = obs.ball.ring
        sim.step(tuple(u[k]))
    actions = np.vstack([u[:n - 1], [[np.nan, np.nan]]])
    return Trajectory(t=np.arange(n) * sim_cfg.dt, ring=ring, theta=theta,
                      theta_dot=nan, beta=beta, beta_dot=nan.copy(),
                      gamma=gamma, gamma_dot=nan.copy(), u=actions,
                      trajectory_id=name)


def cmd_collect(cfg, args):
    out = Path(cfg.out_dir) / "trajectories"
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(f"train-{i:02d}", ring, cfg.excitation.duration)
            for i, ring in enumerate(cfg.excitation.start_rings)]
    jobs += [(f"eval-{i:02d}", ring, cfg.eval.eval_duration)
             for i, ring in enumerate(cfg.eval.eval_start_rings)]
    for name, ring, duration in jobs:
        traj = _record_trajectory(cfg, name, ring, duration)
        save_trajectory(out / f"{name}.csv", traj)
        print(f"collect: wrote {name}.csv "
              f"({duration:.0f} s from ring {ring})")
    _write_json(out / "manifest.json", {
        "config": cfg.resolved(),
        "files": _hash_files(out.glob("*.csv")),
    })
    return 0


# -- pipeline ---------------------------------------------------------------------


def _load_processed(cfg, pattern):
    traj_dir = Path(cfg.out_dir) / "trajectories"
    files = _require_files(traj_dir, pattern, "collect")
    pl = cfg.pipeline
    processed = []
    for f in files:
        processed.append(process_trajectory(
            load_trajectory(f),
            theta_process_var=pl.theta_process_var,
            theta_meas_var=pl.theta_meas_var,
            tilt_process_var=pl.tilt_process_var,
            tilt_meas_var=pl.tilt_meas_var,
            cutoff_hz=pl.cutoff_hz))
    return files, processed


def _fit_platform_arx(traj, orders, control_orders):
    """Identify both tilt axes at the reported and the planner orders.

    The planner needs a first-order-numerator fit (one input lag) because
    the six-dimensional planning state is only Markov at that order; the
    reported orders keep the conventional two-lag numerator.
    """
    docs = {}
    for axis, y in (("beta", traj.beta), ("gamma", traj.gamma)):
        u = traj.u[:-1, 0 if axis == "beta" else 1]
        docs[axis] = fit_arx(u, y[:-1], orders).to_doc()
        docs[f"{axis}_control"] = fit_arx(u, y[:-1], control_orders).to_doc()
    return docs


def cmd_pipeline(cfg, args):
    files, processed = _load_processed(cfg, "train-*.csv")
    geo = cfg.geometry.build()
    out = Path(cfg.out_dir) / "datasets"
    out.mkdir(parents=True, exist_ok=True)

    sets = build_datasets(processed, geo, max_rows=cfg.pipeline.max_train_rows)
    transitions = build_transition_data(
        processed, geo, max_rows=cfg.pipeline.max_transition_rows)
    counts = {}
    for ring in range(1, geo.n_rings + 1):
        train, test = sets[ring]
        tr_train, tr_test = transitions[ring]
        counts[str(ring)] = {"train": len(train), "test": len(test),
                             "transitions_train": len(tr_train),
                             "transitions_test": len(tr_test)}
        if len(train) == 0:
            print(f"pipeline: ring {ring} has no usable rows; skipped")
            continue
        save_dataset(out / f"ring-{ring}-train.csv", train)
        save_dataset(out / f"ring-{ring}-test.csv", test)
        save_transitions(out / f"transitions-{ring}-train.csv", tr_train)
        save_transitions(out / f"transitions-{ring}-test.csv", tr_test)

    control_orders = (2, 1, cfg.sim_config().delay_samples + 1)
    arx_docs = _fit_platform_arx(processed[0], cfg.pipeline.arx_orders,
                                 control_orders)
    fits = {}
    for axis in ("beta", "gamma"):
        model = arx_from_doc(arx_docs[axis])
        col = 0 if axis == "beta" else 1
        fits[axis] = [simulation_fit_percent(model, p.u[:-1, col],
                                             getattr(p, axis)[:-1])
                      for p in processed]
    _write_json(out / "arx.json", arx_docs)

    clusters = learn_transition_clusters(
        processed, geo, proximity=cfg.pipeline.cluster_proximity,
        min_events=cfg.pipeline.cluster_min_events)
    _write_json(out / "clusters.json", {"pairs": [
        {"outer_ring": c.outer_ring, "inner_ring": c.inner_ring,
         "outer_theta": c.outer_theta, "inner_theta": c.inner_theta,
         "direction": list(c.direction), "n_events": c.n_events}
        for c in clusters]})

    _write_json(out / "pipeline.json", {
        "config": cfg.resolved(),
        "inputs": _hash_files(files),
        "rows": counts,
        "arx_simulation_fit_percent": fits,
        "n_transition_clusters": len(clusters),
    })
    for ring, c in counts.items():
        print(f"pipeline: ring {ring}: {c['train']} train / {c['test']} test "
              f"rows, {c['transitions_train']} transition rows")
    print(f"pipeline: {len(clusters)} gate clusters, ARX fit "
          + ", ".join(f"{a}={min(v):.1f}%" for a, v in fits.items()))
    return 0


# -- train ------------------------------------------------------------------------


def _model_kinds(cfg, args):
    if getattr(args, "models", None):
        kinds = tuple(k.strip() for k in args.models.split(",") if k.strip())
        bad = [k for k in kinds if k not in MODEL_KINDS]
        if bad:
            raise ValidationError(
                f"unknown model kind(s) {bad}; expected {MODEL_KINDS}")
        return kinds
    return cfg.models.kinds


def _rings(cfg, args, available):
    if getattr(args, "ring", None) is not None:
        if args.ring not in available:
            raise ValidationError(
                f"--ring {args.ring} not in configured rings {available}")
        return (args.ring,)
    return tuple(available)


def _basis(cfg, ring):
    geo = cfg.geometry.build()
    return BasisConfig(ring_radius=geo.ring_radius(ring),
                       gravity=cfg.sim.gravity)


def _dataset_path(cfg, ring, split, transitions=False):
    stem = f"transitions-{ring}-{split}" if transitions else f"ring-{ring}-{split}"
    return _require_file(Path(cfg.out_dir) / "datasets" / f"{stem}.csv",
                         "pipeline")


def cmd_train(cfg, args):
    kinds = _model_kinds(cfg, args)
    rings = _rings(cfg, args, cfg.models.rings)
    out = Path(cfg.out_dir) / "models"
    out.mkdir(parents=True, exist_ok=True)
    ms = cfg.models
    report = {}
    timings = {}
    inputs = {}
    for ring in rings:
        ds = load_dataset(_dataset_path(cfg, ring, "train"))
        tr = load_transitions(_dataset_path(cfg, ring, "train",
                                            transitions=True))
        inputs[f"ring-{ring}-train.csv"] = _sha256(
            _dataset_path(cfg, ring, "train"))
        for kind in kinds:
            discrete = kind == "NPd"
            X = tr.inputs if discrete else ds.inputs
            y = tr.deltas if discrete else ds.targets
            start = time.perf_counter()
            model = fit_model(
                kind, X, y, _basis(cfg, ring), ard=ms.ard,
                encode_angle=ms.encode_angle, n_restarts=ms.n_restarts,
                max_iter=ms.max_iter,
                random_state=derive_seed(cfg.seed, f"train/{ring}/{kind}"))
            timings[f"ring-{ring}-{kind}"] = time.perf_counter() - start
            doc = model_to_doc(model, kind, ring)
            save_model_doc(out / f"ring-{ring}-{kind}.json", doc)
            report[f"ring-{ring}-{kind}"] = _train_summary(kind, doc, len(X))
            print(f"train: ring {ring} {kind:>3} on {len(X)} rows "
                  f"({timings[f'ring-{ring}-{kind}']:.1f} s)")
    _write_json(out / "train.json", {"config": cfg.resolved(),
                                     "inputs": inputs, "models": report})
    _write_json(out / "timing.json", {"fit_seconds": timings})
    return 0


def _train_summary(kind, doc, n_rows):
    entry = {"kind": kind, "n_rows": n_rows}
    if kind == "P":
        entry["basis"] = doc["basis"]
    elif kind == "NPd":
        for part in ("theta_gp", "theta_dot_gp"):
            entry[part] = {"kernel": doc[part]["kernel"],
                           "noise_var": doc[part]["noise_var"],
                           **doc[part]["meta"]}
    else:
        entry.update({"kernel": doc["kernel"], "noise_var": doc["noise_var"],
                      **doc["meta"]})
    return entry


# -- eval -------------------------------------------------------------------------


def _load_models(cfg, rings, kinds):
    """{(ring, kind): model} for every requested combination."""
    model_dir = Path(cfg.out_dir) / "models"
    out = {}
    hashes = {}
    for ring in rings:
        for kind in kinds:
            path = _require_file(model_dir / f"ring-{ring}-{kind}.json",
                                 "train")
            k, r, model = model_from_doc(load_model_doc(path))
            if (k, r) != (kind, ring):
                raise ValidationError(
                    f"{path} holds {k} for ring {r}, expected {kind}/{ring}")
            out[(ring, kind)] = model
            hashes[path.name] = _sha256(path)
    return out, hashes


def _nrmse_table(cfg, models, rings, kinds):
    """Per-ring train/test one-step accuracy for every kind.

    Continuous kinds score predicted angular acceleration; the discrete
    kind scores its per-sample velocity change on the transition sets,
    which is the comparable one-step quantity it actually predicts.
    """
    table = {}
    for ring in rings:
        cells = {}
        cont = {s: load_dataset(_dataset_path(cfg, ring, s))
                for s in ("train", "test")}
        disc = {s: load_transitions(_dataset_path(cfg, ring, s,
                                                  transitions=True))
                for s in ("train", "test")}
        for kind in kinds:
            model = models[(ring, kind)]
            entry = {}
            for split in ("train", "test"):
                if kind == "NPd":
                    ds = disc[split]
                    pred = np.asarray(model.predict(ds.inputs))[:, 1]
                    entry[split] = nrmse(pred, ds.deltas[:, 1])
                else:
                    ds = cont[split]
                    entry[split] = nrmse(model.predict(ds.inputs),
                                         ds.targets)
            cells[kind] = entry
        table[str(ring)] = cells
    return table


def _nrmse_text(table, kinds):
    lines = ["one-step nRMSE (train / test)", ""]
    header = "ring  " + "".join(f"{k:>16}" for k in kinds)
    lines.append(header)
    for ring in sorted(table, key=int):
        row = f"{ring:>4}  "
        for kind in kinds:
            cell = table[ring][kind]
            row += f"{cell['train']:7.3f} /{cell['test']:6.3f} "
        lines.append(row)
    lines += ["", "NPd cells score the predicted per-sample velocity change",
              "on the transition sets; other kinds score predicted angular",
              "acceleration on the regression sets."]
    return "\n".join(lines) + "\n"


def _rollout_curves(cfg, models, kinds):
    """Mean per-step |theta| and |theta_dot| rollout errors over gate windows."""
    files, processed = _load_processed(cfg, "eval-*.csv")
    geo = cfg.geometry.build()
    n = cfg.eval.rollout_steps
    hits = select_gate_windows(processed, geo, n=n)
    by_ring = {}
    for ti, k in hits:
        by_ring.setdefault(int(processed[ti].ring[k]), []).append((ti, k))
    rings = [r for r in by_ring if (r, kinds[0]) in models]
    used = [hit for r in rings for hit in by_ring[r]]
    if not used:
        raise ValidationError(
            "no gate-terminated windows fall on rings with trained models")

    curves = {}
    for kind in kinds:
        errs_th, errs_td = [], []
        for ring in rings:
            layout = "transition" if kind == "NPd" else "augmented"
            W = np.stack([window_matrix(processed[ti], k, n, layout)
                          for ti, k in by_ring[ring]])
            if kind == "NPd":
                pred = rollout_npd_batch(models[(ring, kind)], W)
            else:
                pred, _ = rollout_batch(models[(ring, kind)], W)
            errs_th.append(np.abs(angle_diff(pred[..., 0], W[..., 0])))
            errs_td.append(np.abs(pred[..., 1] - W[..., 1]))
        e_th = np.vstack(errs_th)
        e_td = np.vstack(errs_td)
        curves[kind] = (e_th.mean(axis=0), e_td.mean(axis=0))
    return curves, len(used), _hash_files(files)


def _learning_curves(cfg):
    ev = cfg.eval
    train = load_dataset(_dataset_path(cfg, ev.curve_ring, "train"))
    test = load_dataset(_dataset_path(cfg, ev.curve_ring, "test"))
    sizes = [s for s in ev.learning_sizes if s <= len(train)]
    out = {}
    for kind in ev.curve_kinds:
        out[kind] = learning_curve(
            kind, train, test, sizes, _basis(cfg, ev.curve_ring),
            ard=cfg.models.ard, encode_angle=cfg.models.encode_angle,
            n_restarts=ev.curve_restarts, max_iter=ev.curve_max_iter,
            random_state=derive_seed(cfg.seed, f"curve/{kind}"))
    return out, sizes


def cmd_eval(cfg, args):
    kinds = _model_kinds(cfg, args)
    rings = _rings(cfg, args, cfg.models.rings)
    models, model_hashes = _load_models(cfg, rings, kinds)
    out = Path(cfg.out_dir) / "eval"
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()

    table = _nrmse_table(cfg, models, rings, kinds)
    (out / "nrmse.txt").write_text(_nrmse_text(table, kinds))

    curves, n_windows, eval_hashes = _rollout_curves(cfg, models, kinds)
    rows = ["step," + ",".join(f"{k}_theta_err,{k}_theta_dot_err"
                               for k in kinds)]
    for step in range(cfg.eval.rollout_steps + 1):
        cells = []
        for kind in kinds:
            e_th, e_td = curves[kind]
            cells += [repr(float(e_th[step])), repr(float(e_td[step]))]
        rows.append(f"{step}," + ",".join(cells))
    (out / "rollout-error.csv").write_text("\n".join(rows) + "\n")

    horizon_block = {}
    for kind in kinds:
        e_th, e_td = curves[kind]
        horizon_block[kind] = {
            "theta_err_20": float(e_th[min(20, len(e_th) - 1)]),
            "theta_err_40": float(e_th[min(40, len(e_th) - 1)]),
            "theta_dot_err_20": float(e_td[min(20, len(e_td) - 1)]),
            "theta_dot_err_40": float(e_td[min(40, len(e_td) - 1)]),
        }

    lc, sizes = _learning_curves(cfg)
    rows = ["kind,size,train_nrmse,test_nrmse"]
    for kind, records in lc.items():
        for rec in records:
            rows.append(f"{kind},{rec['size']},{repr(rec['train_nrmse'])},"
                        f"{repr(rec['test_nrmse'])}")
    (out / "learning-curve.csv").write_text("\n".join(rows) + "\n")

    _write_json(out / "summary.json", {
        "config": cfg.resolved(),
        "inputs": {**model_hashes, **eval_hashes},
        "nrmse": table,
        "rollout": {"n_windows": n_windows, "steps": cfg.eval.rollout_steps,
                    "errors_at_horizons": horizon_block},
        "learning_curve": {"ring": cfg.eval.curve_ring, "sizes": sizes,
                           "records": lc},
    })
    _write_json(out / "timing.json",
                {"eval_seconds": time.perf_counter() - t0})
    print(f"eval: {n_windows} gate windows, reports under {out}")
    return 0


# -- control ----------------------------------------------------------------------


def _control_arx(cfg):
    path = _require_file(Path(cfg.out_dir) / "datasets" / "arx.json",
                         "pipeline")
    docs = json.loads(path.read_text())
    return (arx_from_doc(docs["beta_control"]),
            arx_from_doc(docs["gamma_control"]), _sha256(path))


def _learned_dynamics(cfg, rings):
    models, hashes = _load_models(cfg, rings, ("SP",))
    beta_arx, gamma_arx, arx_hash = _control_arx(cfg)
    hashes["arx.json"] = arx_hash
    dyn = {ring: LearnedDynamics(models[(ring, "SP")], beta_arx, gamma_arx,
                                 dt=cfg.sim.dt)
           for ring in rings}
    return dyn, models, (beta_arx, gamma_arx), hashes


def _gate_safe_angle(rng, geo, ring, shift, margin):
    """Random start angle whose move stays clear of every gate span."""
    for _ in range(1000):
        theta = rng.uniform(-np.pi, np.pi)
        ok = True
        for probe in (theta, theta + shift):
            for off in (-margin, 0.0, margin):
                th = probe + off
                if (geo.in_gate_span(ring, th, inward=True) is not None
                        or geo.in_gate_span(ring, th, inward=False)
                        is not None):
                    ok = False
        if ok:
            return wrap_angle(theta)
    raise ValidationError("no gate-free start angle found")


def _cost_config(cs):
    return CostConfig(state_weights=cs.state_weights,
                      smooth_abs_width=cs.smooth_abs_width,
                      control_scale=cs.control_scale,
                      terminal_multiplier=cs.terminal_multiplier)


def cmd_control(cfg, args):
    cs = cfg.control
    rings = _rings(cfg, args, cs.rings)
    dyn, _, _, hashes = _learned_dynamics(cfg, rings)
    geo = cfg.geometry.build()
    out = Path(cfg.out_dir) / "control"
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()

    cost = _cost_config(cs)
    gains = PdGains(position=cs.pd_position, rate=cs.pd_rate)
    rows = ["ring,run,controller,theta0,target_theta,"
            "settling_time,steady_error,settled"]
    results = {}
    for ring in rings:
        rng = np.random.default_rng(derive_seed(cfg.seed,
                                                f"control/ring-{ring}"))
        margin = 1.5 * geo.ball_angular_size(ring)
        per = {"ilqg": [], "pd": []}
        for run in range(cs.n_runs):
            theta0 = _gate_safe_angle(rng, geo, ring, cs.shift, margin)
            for controller in ("ilqg", "pd"):
                sim = MazeSimulator(cfg.sim_config(), seed=derive_seed(
                    cfg.seed, f"control/ring-{ring}/run-{run}"))
                sim.reset(FullState(
                    ball=BallState(ring=ring, theta=theta0, theta_dot=0.0),
                    platform=PlatformState()))
                res = run_repositioning(
                    sim, dyn[ring], shift=cs.shift, duration=cs.duration,
                    controller=controller, cost=cost, pd_gains=gains,
                    horizon=cs.horizon,
                    max_plan_iterations=cs.max_plan_iterations,
                    trajectory_id=f"control-{ring}-{run}-{controller}")
                save_trajectory(
                    out / f"traj-ring{ring}-run{run}-{controller}.csv",
                    res.trajectory)
                per[controller].append(res)
                rows.append(
                    f"{ring},{run},{controller},{repr(float(theta0))},"
                    f"{repr(float(res.target_theta))},"
                    f"{repr(float(res.settling_time))},"
                    f"{repr(float(res.steady_error))},{int(res.settled)}")
        results[str(ring)] = {
            c: _settling_summary(per[c], cs.duration) for c in per}
        print(f"control: ring {ring}: ilqg mean settle "
              f"{results[str(ring)]['ilqg']['mean_settling_time']:.2f} s, "
              f"pd {results[str(ring)]['pd']['mean_settling_time']:.2f} s")
    (out / "results.csv").write_text("\n".join(rows) + "\n")
    _write_json(out / "report.json", {"config": cfg.resolved(),
                                      "inputs": hashes,
                                      "rings": results})
    _write_json(out / "timing.json",
                {"control_seconds": time.perf_counter() - t0})
    return 0


def _settling_summary(results, duration):
    # non-settling runs count the full episode, keeping means finite
    times = [min(r.settling_time, duration) for r in results]
    return {
        "n_runs": len(results),
        "n_settled": int(sum(r.settled for r in results)),
        "mean_settling_time": float(np.mean(times)),
        "max_settling_time": float(np.max(times)),
        "mean_steady_error": float(np.mean([r.steady_error
                                            for r in results])),
        "max_steady_error": float(np.max([r.steady_error
                                          for r in results])),
    }


# -- maze -------------------------------------------------------------------------


def _load_clusters(cfg):
    path = _require_file(Path(cfg.out_dir) / "datasets" / "clusters.json",
                         "pipeline")
    doc = json.loads(path.read_text())
    pairs = [ClusterPair(outer_ring=p["outer_ring"],
                         inner_ring=p["inner_ring"],
                         outer_theta=p["outer_theta"],
                         inner_theta=p["inner_theta"],
                         direction=tuple(p["direction"]),
                         n_events=p["n_events"])
             for p in doc["pairs"]]
    return pairs, _sha256(path)


def cmd_maze(cfg, args):
    mz = cfg.maze
    goal = args.ring if getattr(args, "ring", None) is not None \
        else mz.goal_ring
    geo = cfg.geometry.build()
    if not 1 <= goal <= geo.n_rings:
        raise ValidationError(f"goal ring {goal} outside 1..{geo.n_rings}")
    rings = tuple(r for r in range(1, geo.n_rings + 1)
                  if r in cfg.models.rings)
    models, model_hashes = _load_models(cfg, rings, ("SP",))
    beta_arx, gamma_arx, arx_hash = _control_arx(cfg)
    clusters, cluster_hash = _load_clusters(cfg)
    hashes = {**model_hashes, "arx.json": arx_hash,
              "clusters.json": cluster_hash}
    ball_models = {ring: models[(ring, "SP")] for ring in rings}

    nav_cfg = NavigatorConfig(
        goal_ring=goal, horizon=mz.horizon,
        segment_timeout=mz.segment_timeout, total_timeout=mz.total_timeout,
        deviation_threshold=mz.deviation_threshold,
        pd_burst_steps=mz.pd_burst_steps,
        transition_timeout=mz.transition_timeout,
        span_entry_rate=mz.span_entry_rate,
        max_plan_iterations=mz.max_plan_iterations,
        cost=_cost_config(cfg.control),
        pd_gains=PdGains(position=cfg.control.pd_position,
                         rate=cfg.control.pd_rate))
    out = Path(cfg.out_dir) / "maze"
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()

    rows = ["run,success,elapsed,final_ring,n_segments"]
    logs = []
    for run in range(mz.n_runs):
        rng = np.random.default_rng(derive_seed(cfg.seed,
                                                f"maze/run-{run}/start"))
        sim = MazeSimulator(cfg.sim_config(),
                            seed=derive_seed(cfg.seed, f"maze/run-{run}"))
        sim.reset(FullState(
            ball=BallState(ring=mz.start_ring,
                           theta=wrap_angle(rng.uniform(-np.pi, np.pi)),
                           theta_dot=0.0),
            platform=PlatformState()))
        log = navigate_maze(sim, ball_models, beta_arx, gamma_arx, clusters,
                            config=nav_cfg, trajectory_id=f"maze-{run:02d}")
        save_trajectory(out / f"run-{run:02d}.csv", log.trajectory)
        logs.append(log)
        rows.append(f"{run},{int(log.success)},{repr(float(log.elapsed))},"
                    f"{log.final_ring},{len(log.segments)}")
        print(f"maze: run {run}: "
              + (f"reached ring {goal} in {log.elapsed:.1f} s"
                 if log.success else
                 f"stopped at ring {log.final_ring}"))
    (out / "runs.csv").write_text("\n".join(rows) + "\n")
    n_success = sum(log.success for log in logs)
    _write_json(out / "report.json", {
        "config": cfg.resolved(),
        "inputs": hashes,
        "goal_ring": goal,
        "n_runs": mz.n_runs,
        "n_success": int(n_success),
        "mean_elapsed_success": float(np.mean(
            [log.elapsed for log in logs if log.success]))
        if n_success else None,
    })
    _write_json(out / "timing.json",
                {"maze_seconds": time.perf_counter() - t0})
    print(f"maze: {n_success}/{mz.n_runs} runs reached ring {goal}")
    return 0


# -- entry point --------------------------------------------------------------


_COMMANDS = {
    "collect": cmd_collect,
    "pipeline": cmd_pipeline,
    "train": cmd_train,
    "eval": cmd_eval,
    "control": cmd_control,
    "maze": cmd_maze,
}


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="YAML experiment config (defaults apply)")
    common.add_argument("--seed", type=int, metavar="N",
                        help="override the global seed")
    common.add_argument("--out", metavar="DIR",
                        help="override the output directory")
    common.add_argument("--models", metavar="LIST",
                        help="comma-separated model kinds (train/eval)")
    common.add_argument("--ring", type=int, metavar="N",
                        help="restrict to one ring (train/eval/control); "
                             "goal ring for maze")
    p = argparse.ArgumentParser(
        prog="tiltmaze",
        description="Simulate, learn, and control a ball in a tilting "
                    "ring maze.")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "collect": "record excitation trajectories with the simulator",
        "pipeline": "filter logs into per-ring datasets and ARX fits",
        "train": "fit the forward-model zoo on the datasets",
        "eval": "score one-step and rollout accuracy, learning curves",
        "control": "compare trajectory-optimized and PD repositioning",
        "maze": "run full maze navigations to the goal ring",
    }
    for name, fn in _COMMANDS.items():
        sub.add_parser(name, parents=[common], help=helps[name])
    return p


def _resolve_config(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out_dir=args.out)
    return cfg


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[args.command](cfg, args)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except MissingPrerequisiteError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

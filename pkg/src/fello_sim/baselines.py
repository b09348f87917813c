"""Centralized and distributed baseline architectures.

Both baselines reuse the LESC membership schedule (edge selection,
pruning, re-clustering, handover) so their curves share the federated
run's time axis and cluster composition. The centralized edge trains on
raw data shipped once per clustering epoch, with the same channel
impairment applied to the feature payload that the federated run applies
to models. Distributed clients train purely locally and never transmit.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import overhead
from .fl_engine import (
    CorruptionSpec,
    Dataset,
    TrainConfig,
    corrupt_vector,
    evaluate,
    init_model,
    partition_data,
    sgd_epoch,
)
from .lesc import LescConfig, RoundLog, membership_schedule, parallel_map
from .optical_link import OpticalParams
from .orbits import WalkerConfig
from .seeding import Substreams


@dataclass
class _DlClient:
    shard: Dataset
    model: object
    rng: np.random.Generator


def _ship_shard(
    shard: Dataset, link, corruption: CorruptionSpec, rng: np.random.Generator
) -> Dataset:
    """One client's raw upload: features impaired per link, labels intact."""
    flat = corrupt_vector(shard.features.ravel(), link, corruption, rng)
    return Dataset(flat.reshape(shard.features.shape), shard.labels, shard.n_classes)


def _concat(shards: list, n_classes: int) -> Dataset:
    features = np.concatenate([s.features for s in shards], axis=0)
    labels = np.concatenate([s.labels for s in shards], axis=0)
    return Dataset(features, labels, n_classes)


def run_cl(
    cfg: LescConfig,
    walker: WalkerConfig,
    isl: OpticalParams,
    gsl: OpticalParams,
    train_cfg: TrainConfig,
    corruption: CorruptionSpec,
    train_set: Dataset,
    test_set: Dataset,
    samples_per_client: int,
    streams: Substreams,
    workers: int = 1,
) -> list:
    """Centralized training at the edge on pooled client uploads.

    Newly admitted clients ship their shard when they join; a handover
    makes every member re-ship to the new edge. The pool always holds
    exactly the current members' uploads.
    """
    schedule = membership_schedule(cfg, walker, isl, gsl, streams, train_cfg.local_epochs)
    model = init_model(
        train_set.n_features, train_cfg.hidden_size, train_set.n_classes,
        streams.derive("init"),
    )
    edge_rng = streams.derive("cltrain")
    times = overhead.PRESET_TIMES["cl"]
    shards = {}
    pool = {}
    logs = []
    for rec in schedule:
        if rec.coverage_failed:
            accuracy, loss = evaluate(model, test_set)
            logs.append(
                RoundLog(rec.round_index, rec.edge, len(rec.members), False, False,
                         accuracy, loss, math.nan,
                         train_cfg.local_epochs * times["t_epoch_s"])
            )
            continue
        member_set = set(rec.members)
        for sat in list(shards):
            if sat not in member_set:
                del shards[sat]
                del pool[sat]
        if rec.admitted:
            shard_rng = streams.derive("shard", rec.round_index)
            for sat, shard in partition_data(
                train_set, list(rec.admitted), samples_per_client, shard_rng
            ).items():
                shards[sat] = shard
        # a handover moves the server, so every member re-ships to it
        shippers = rec.members if rec.handover else rec.admitted
        shipped_snrs = []
        for sat in shippers:
            link = rec.links.sample(sat)
            ship_rng = streams.derive("ship", rec.round_index, sat.plane, sat.slot)
            pool[sat] = _ship_shard(shards[sat], link, corruption, ship_rng)
            shipped_snrs.append(link.snr_db)
        if rec.members:
            pooled = _concat([pool[sat] for sat in rec.members], train_set.n_classes)
            for _ in range(train_cfg.local_epochs):
                model = sgd_epoch(model, pooled, train_cfg, edge_rng)
        accuracy, loss = evaluate(model, test_set)
        mean_snr = float(np.mean(shipped_snrs)) if shipped_snrs else math.nan
        delay = train_cfg.local_epochs * times["t_epoch_s"]
        if shippers:
            delay += times["t_send_s"]
        logs.append(
            RoundLog(
                rec.round_index, rec.edge, len(rec.members), rec.reclustered,
                rec.handover, accuracy, loss, mean_snr, delay,
            )
        )
    return logs


def run_dl(
    cfg: LescConfig,
    walker: WalkerConfig,
    isl: OpticalParams,
    gsl: OpticalParams,
    train_cfg: TrainConfig,
    corruption: CorruptionSpec,
    train_set: Dataset,
    test_set: Dataset,
    samples_per_client: int,
    streams: Substreams,
    workers: int = 1,
) -> list:
    """Distributed training with no exchange at all.

    Every member continues its own model each round; reported accuracy and
    loss are means over the current members. No link is ever evaluated, so
    the logs cannot depend on channel parameters.
    """
    schedule = membership_schedule(cfg, walker, isl, gsl, streams, train_cfg.local_epochs)
    w0 = init_model(
        train_set.n_features, train_cfg.hidden_size, train_set.n_classes,
        streams.derive("init"),
    )
    times = overhead.PRESET_TIMES["dl"]
    delay = train_cfg.local_epochs * times["t_epoch_s"]
    clients = {}
    logs = []
    for rec in schedule:
        if rec.coverage_failed:
            held = [clients[sat].model for sat in rec.members if sat in clients]
            if held:
                scores = [evaluate(m, test_set) for m in held]
                acc = float(np.mean([s[0] for s in scores]))
                loss = float(np.mean([s[1] for s in scores]))
            else:
                acc, loss = math.nan, math.nan
            logs.append(
                RoundLog(rec.round_index, rec.edge, len(rec.members), False, False,
                         acc, loss, math.nan, delay)
            )
            continue
        member_set = set(rec.members)
        for sat in list(clients):
            if sat not in member_set:
                del clients[sat]
        if rec.admitted:
            shard_rng = streams.derive("shard", rec.round_index)
            shards = partition_data(
                train_set, list(rec.admitted), samples_per_client, shard_rng
            )
            for sat in rec.admitted:
                clients[sat] = _DlClient(
                    shard=shards[sat],
                    model=w0.copy(),
                    rng=streams.derive("dltrain", rec.round_index, sat.plane, sat.slot),
                )

        def client_round(sat):
            client = clients[sat]
            model = client.model
            for _ in range(train_cfg.local_epochs):
                model = sgd_epoch(model, client.shard, train_cfg, client.rng)
            return model

        results = parallel_map(client_round, list(rec.members), workers)
        accuracies, losses = [], []
        for sat, model in zip(rec.members, results):
            clients[sat].model = model
            accuracy, loss = evaluate(model, test_set)
            accuracies.append(accuracy)
            losses.append(loss)
        mean_acc = float(np.mean(accuracies)) if accuracies else math.nan
        mean_loss = float(np.mean(losses)) if losses else math.nan
        logs.append(
            RoundLog(
                rec.round_index, rec.edge, len(rec.members), rec.reclustered,
                rec.handover, mean_acc, mean_loss, math.nan, delay,
            )
        )
    return logs

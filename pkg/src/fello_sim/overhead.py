"""Closed-form training overhead for the three architectures.

Total delay, compute, and memory footprints for federated learning over
ISLs (fello), fully local distributed training (dl), and centralized
training at one edge fed by raw data uploads (cl). Component times either
come from the pinned measurement preset or are derived from payload sizes,
link rate, and device throughput.
"""

import csv
import io
import math
from dataclasses import dataclass

MODES = ("fello", "cl", "dl")

# Measured component times (seconds) and compute/memory figures per mode.
PRESET_TIMES = {
    "fello": {"t_send_s": 0.101e-3, "t_epoch_s": 29.38e-3, "t_agg_s": 0.089e-3},
    "cl": {"t_send_s": 0.445e-3, "t_epoch_s": 195.88e-3, "t_agg_s": 0.0},
    "dl": {"t_send_s": 0.0, "t_epoch_s": 29.38e-3, "t_agg_s": 0.0},
}
PRESET_FIGURES = {
    "fello": {"compute_flops": 0.878e12, "server_memory_bytes": 0.52e6,
              "client_memory_bytes": 7.04e6},
    "cl": {"compute_flops": 17.56e12, "server_memory_bytes": 140.28e6,
           "client_memory_bytes": 7.01e6},
    "dl": {"compute_flops": 0.878e12, "server_memory_bytes": math.nan,
           "client_memory_bytes": 7.04e6},
}


@dataclass(frozen=True)
class OverheadInputs:
    """Component times feeding one mode's closed-form delay."""

    rounds: int
    local_epochs: int
    t_send_s: float
    t_epoch_s: float
    t_agg_s: float
    mode: str = "fello"

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError(f"rounds must be >= 0, got {self.rounds}")
        if self.local_epochs < 1:
            raise ValueError(f"local epochs must be >= 1, got {self.local_epochs}")
        for name in ("t_send_s", "t_epoch_s", "t_agg_s"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"unknown overhead mode {self.mode!r}")


@dataclass(frozen=True)
class OverheadReport:
    """Delay, compute and memory totals for one architecture."""

    architecture: str
    total_delay_s: float
    compute_flops: float
    server_memory_bytes: float
    client_memory_bytes: float
    components: tuple


def _require_mode(inputs: OverheadInputs, mode: str):
    if inputs.mode != mode:
        raise ValueError(f"inputs are for mode {inputs.mode!r}, expected {mode!r}")


def overhead_fello(inputs: OverheadInputs) -> float:
    """A rounds of (download + upload + E local epochs + aggregation)."""
    _require_mode(inputs, "fello")
    return inputs.rounds * (
        2.0 * inputs.t_send_s + inputs.local_epochs * inputs.t_epoch_s + inputs.t_agg_s
    )


def overhead_dl(inputs: OverheadInputs) -> float:
    """Purely local: A*E training epochs, nothing transmitted."""
    _require_mode(inputs, "dl")
    return inputs.rounds * inputs.local_epochs * inputs.t_epoch_s


def overhead_cl(inputs: OverheadInputs) -> float:
    """One raw-data upload, then A*E epochs at the central edge."""
    _require_mode(inputs, "cl")
    return inputs.t_send_s + inputs.rounds * inputs.local_epochs * inputs.t_epoch_s


def total_delay(inputs: OverheadInputs) -> float:
    """Dispatch to the closed form matching inputs.mode."""
    return {"fello": overhead_fello, "dl": overhead_dl, "cl": overhead_cl}[inputs.mode](inputs)


def preset_inputs(mode: str, rounds: int = 40, local_epochs: int = 2) -> OverheadInputs:
    """Component-time preset reproducing the pinned measurement table."""
    if mode not in MODES:
        raise ValueError(f"unknown overhead mode {mode!r}")
    times = PRESET_TIMES[mode]
    return OverheadInputs(rounds=rounds, local_epochs=local_epochs, mode=mode, **times)


def derive_times(
    model_bytes: float,
    data_bytes: float,
    link_rate_bps: float,
    flops_per_epoch: float,
    device_flops: float,
    rounds: int,
    local_epochs: int,
    mode: str,
    agg_flops: float = 0.0,
) -> OverheadInputs:
    """Component times from payload sizes, link rate and device throughput.

    Model transfers pace fello sends, the raw shard paces the one-off cl
    upload, and dl transmits nothing.
    """
    for name, value in (
        ("model_bytes", model_bytes),
        ("data_bytes", data_bytes),
        ("link_rate_bps", link_rate_bps),
        ("flops_per_epoch", flops_per_epoch),
        ("device_flops", device_flops),
    ):
        if value <= 0.0:
            raise ValueError(f"{name} must be > 0, got {value}")
    if agg_flops < 0.0:
        raise ValueError(f"agg_flops must be >= 0, got {agg_flops}")
    if mode == "fello":
        t_send = 8.0 * model_bytes / link_rate_bps
    elif mode == "cl":
        t_send = 8.0 * data_bytes / link_rate_bps
    elif mode == "dl":
        t_send = 0.0
    else:
        raise ValueError(f"unknown overhead mode {mode!r}")
    return OverheadInputs(
        rounds=rounds,
        local_epochs=local_epochs,
        t_send_s=t_send,
        t_epoch_s=flops_per_epoch / device_flops,
        t_agg_s=agg_flops / device_flops if mode == "fello" else 0.0,
        mode=mode,
    )


def analytic_flops_per_sample(arch: tuple) -> float:
    """Forward+backward cost per sample: 3x the forward multiply-adds."""
    if len(arch) < 2:
        raise ValueError(f"architecture needs >= 2 layer sizes, got {arch}")
    forward = sum(2.0 * fan_in * fan_out for fan_in, fan_out in zip(arch[:-1], arch[1:]))
    return 3.0 * forward


def _components(inputs: OverheadInputs) -> tuple:
    train = inputs.rounds * inputs.local_epochs * inputs.t_epoch_s
    if inputs.mode == "fello":
        return (
            ("send", 2.0 * inputs.rounds * inputs.t_send_s),
            ("train", train),
            ("aggregate", inputs.rounds * inputs.t_agg_s),
        )
    if inputs.mode == "cl":
        return (("send", inputs.t_send_s), ("train", train))
    return (("train", train),)


def build_reports(
    rounds: int,
    local_epochs: int,
    accounting: str = "preset",
    arch: tuple = None,
    samples_per_client: int = None,
    n_params: int = None,
    cluster_size: int = 20,
    device_flops: float = 1e12,
    link_rate_bps: float = 1.25e9,
) -> list:
    """One OverheadReport per architecture.

    'preset' injects the pinned component times and compute/memory figures;
    'analytic' derives everything from the model architecture, shard size,
    and cluster size (4 bytes per parameter and per feature value).
    """
    if accounting not in ("preset", "analytic"):
        raise ValueError(f"unknown overhead accounting {accounting!r}")
    reports = []
    if accounting == "preset":
        for mode in MODES:
            inputs = preset_inputs(mode, rounds=rounds, local_epochs=local_epochs)
            fig = PRESET_FIGURES[mode]
            reports.append(
                OverheadReport(
                    architecture=mode,
                    total_delay_s=total_delay(inputs),
                    compute_flops=fig["compute_flops"],
                    server_memory_bytes=fig["server_memory_bytes"],
                    client_memory_bytes=fig["client_memory_bytes"],
                    components=_components(inputs),
                )
            )
        return reports
    if arch is None or samples_per_client is None or n_params is None:
        raise ValueError("analytic accounting needs arch, samples_per_client, n_params")
    if cluster_size < 1:
        raise ValueError(f"cluster size must be >= 1, got {cluster_size}")
    epoch_flops = analytic_flops_per_sample(arch) * samples_per_client
    model_bytes = 4.0 * n_params
    data_bytes = 4.0 * samples_per_client * arch[0]
    total_train_flops = rounds * local_epochs * epoch_flops * cluster_size
    memory = {
        "fello": (model_bytes, model_bytes + data_bytes),
        "dl": (math.nan, model_bytes + data_bytes),
        "cl": (model_bytes + cluster_size * data_bytes, model_bytes + data_bytes),
    }
    for mode in MODES:
        inputs = derive_times(
            model_bytes=model_bytes,
            data_bytes=data_bytes,
            link_rate_bps=link_rate_bps,
            flops_per_epoch=epoch_flops,
            device_flops=device_flops,
            rounds=rounds,
            local_epochs=local_epochs,
            mode=mode,
            agg_flops=2.0 * cluster_size * n_params,
        )
        server_mem, client_mem = memory[mode]
        reports.append(
            OverheadReport(
                architecture=mode,
                total_delay_s=total_delay(inputs),
                compute_flops=total_train_flops,
                server_memory_bytes=server_mem,
                client_memory_bytes=client_mem,
                components=_components(inputs),
            )
        )
    return reports


def render_text(reports: list) -> str:
    """Human-readable comparison table."""
    lines = [
        f"{'architecture':<14}{'delay [s]':>12}{'compute [TFLOP]':>18}"
        f"{'server mem [MB]':>18}{'client mem [MB]':>18}"
    ]
    for r in reports:
        server = (
            "-"
            if math.isnan(r.server_memory_bytes)
            else f"{r.server_memory_bytes / 1e6:.2f}"
        )
        lines.append(
            f"{r.architecture:<14}{r.total_delay_s:>12.2f}"
            f"{r.compute_flops / 1e12:>18.3f}{server:>18}"
            f"{r.client_memory_bytes / 1e6:>18.2f}"
        )
    return "\n".join(lines) + "\n"


def render_csv(reports: list) -> str:
    """Same numbers as render_text, machine-readable."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["architecture", "total_delay_s", "compute_flops", "server_memory_bytes",
         "client_memory_bytes"]
    )
    for r in reports:
        server = "" if math.isnan(r.server_memory_bytes) else repr(r.server_memory_bytes)
        writer.writerow(
            [r.architecture, repr(r.total_delay_s), repr(r.compute_flops), server,
             repr(r.client_memory_bytes)]
        )
    return buf.getvalue()

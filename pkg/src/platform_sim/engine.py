"""
Seeded discrete-time simulation of a content platform.

Human creators hill-climb price and quality on realized profit and exit when
their trailing profit falls below a threshold. AI creators switch on at a
configured tick, sell at a fixed low price and improve quality at a constant
drift. Each tick every active creator publishes one item; every consumer is
shown a quality-biased slate of this tick's items and buys at most the one
with the best positive score, where the quadratic quality penalty grows with
the platform's cumulative content volume.

All randomness flows through one ``numpy.random.Generator`` held in the state.
Draw order: consumer preferences, human start points, AI start qualities and
initial hill-climb directions at init; afterwards one
``(n_consumers, n_items)`` uniform block per tick for slate sampling.
"""

from __future__ import annotations

import copy
import math
from collections import deque
from dataclasses import dataclass, field, fields, replace
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .metrics import MetricsRow, record_tick
from .model import ModelParams, ParamError, human_cost

HUMAN = "Human"
AI = "AI"

QUALITY_FLOOR = 1e-3


class SimStateError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    Besides the core levers this carries the start points of the agents:
    human creators begin at ``initial_price`` and ``initial_quality`` (the
    consumer-optimal quality when left as ``None``), jittered by
    ``initial_spread``; AI creators sell at ``ai_price`` and start near
    ``ai_quality_mean``. ``preference_spread`` is the relative half-width of
    the uniform draws of each consumer's quality taste and overload
    sensitivity around the model means.

    The defaults are the ``baseline`` calibration (see :mod:`.calibration`).
    """

    n_human_creators: int = 20
    n_ai_creators: int = 80
    n_consumers: int = 500
    steps: int = 500
    introduce_ai_step: int = 100
    platform_fee: float = 0.10
    recommend_bias: float = 1.0
    subsidy: float = 0.0
    price_sensitivity: float = 1.0
    overload_threshold: float = 20000.0
    slate_size: int = 1
    learning_rate: float = 0.05
    exit_window: int = 30
    exit_threshold: float = 5.0
    ai_quality_mean: float = 0.6
    ai_quality_growth: float = 0.002
    seed: int = 0
    model_params: ModelParams = field(default_factory=ModelParams)
    ai_price: float = 0.1
    initial_price: float = 1.0
    initial_quality: Optional[float] = None
    initial_spread: float = 0.2
    preference_spread: float = 0.2
    min_step: float = 0.01
    gini_mode: str = "cumulative"

    def __post_init__(self):
        def check(key, ok, rule):
            if not ok:
                raise ParamError(key, f"must be {rule}, got {getattr(self, key)!r}")

        for key in ("n_human_creators", "n_ai_creators", "n_consumers", "steps",
                    "introduce_ai_step", "slate_size", "exit_window", "seed"):
            value = getattr(self, key)
            check(key, isinstance(value, int) and not isinstance(value, bool), "an integer")
        check("n_human_creators", self.n_human_creators > 0, "> 0")
        check("n_ai_creators", self.n_ai_creators >= 0, ">= 0")
        check("n_consumers", self.n_consumers >= 0, ">= 0")
        check("steps", self.steps >= 0, ">= 0")
        check("introduce_ai_step", 0 <= self.introduce_ai_step, ">= 0")
        check("introduce_ai_step", self.introduce_ai_step <= self.steps, f"<= steps ({self.steps})")
        check("slate_size", self.slate_size > 0, "> 0")
        check("exit_window", self.exit_window > 0, "> 0")
        check("seed", 0 <= self.seed < 2 ** 64, "a 64-bit unsigned integer")
        for key in ("platform_fee", "recommend_bias", "subsidy", "price_sensitivity",
                    "overload_threshold", "learning_rate", "exit_threshold",
                    "ai_quality_mean", "ai_quality_growth", "ai_price", "initial_price",
                    "initial_spread", "preference_spread", "min_step"):
            value = getattr(self, key)
            check(key, isinstance(value, (int, float)) and not isinstance(value, bool)
                  and math.isfinite(value), "a finite number")
        check("platform_fee", 0 <= self.platform_fee < 1, "in [0, 1)")
        check("recommend_bias", self.recommend_bias >= 0, ">= 0")
        check("subsidy", self.subsidy >= 0, ">= 0")
        check("price_sensitivity", self.price_sensitivity > 0, "> 0")
        check("overload_threshold", self.overload_threshold > 0, "> 0")
        check("learning_rate", 0 < self.learning_rate <= 1, "in (0, 1]")
        check("ai_quality_mean", self.ai_quality_mean > 0, "> 0")
        check("ai_price", self.ai_price >= 0, ">= 0")
        check("initial_price", self.initial_price >= 0, ">= 0")
        check("initial_spread", 0 <= self.initial_spread < 1, "in [0, 1)")
        check("preference_spread", 0 <= self.preference_spread < 1, "in [0, 1)")
        check("min_step", self.min_step > 0, "> 0")
        check("gini_mode", self.gini_mode in ("cumulative", "per_tick"),
              "'cumulative' or 'per_tick'")
        if self.initial_quality is not None:
            q0 = self.initial_quality
            check("initial_quality", isinstance(q0, (int, float)) and not isinstance(q0, bool)
                  and math.isfinite(q0) and q0 > 0, "a finite number > 0")
        if not isinstance(self.model_params, ModelParams):
            raise ParamError("model_params", "must be a ModelParams")

    def replace(self, **changes) -> "SimConfig":
        return replace(self, **changes)


@dataclass
class CreatorState:
    id: int
    kind: str
    quality: float
    price: float
    cumulative_revenue: float = 0.0
    trailing_profits: deque = field(default_factory=deque)
    active: bool = False
    content_count: int = 0
    ever_active: bool = False
    # hill-climbing memory
    price_dir: int = 1
    quality_dir: int = 1
    last_moved: Optional[str] = None
    last_profit: Optional[float] = None

    @property
    def is_human(self) -> bool:
        return self.kind == HUMAN

    def clone(self) -> "CreatorState":
        c = copy.copy(self)
        c.trailing_profits = deque(self.trailing_profits, maxlen=self.trailing_profits.maxlen)
        return c


@dataclass
class ConsumerState:
    id: int
    theta_u: float
    delta_u: float
    cumulative_utility: float = 0.0


class Item(NamedTuple):
    creator_id: int
    quality: float
    price: float


@dataclass
class Ledger:
    fees_collected: float = 0.0
    subsidies_paid: float = 0.0

    @property
    def balance(self) -> float:
        return self.fees_collected - self.subsidies_paid


@dataclass
class TickAccounts:
    """Money and activity of a single tick."""

    tick: int = -1
    consumer_payments: float = 0.0
    gross: float = 0.0
    net: float = 0.0
    fees: float = 0.0
    subsidies: float = 0.0
    costs: float = 0.0
    profit: float = 0.0
    utility: float = 0.0
    purchases: int = 0
    n_items: int = 0
    avg_quality: float = 0.0
    avg_price: float = 0.0
    avg_utility: float = 0.0
    creator_gross: Dict[int, float] = field(default_factory=dict)


@dataclass
class SimState:
    """Full simulation state.

    Consumer attributes are stored column-wise; ``consumers`` materializes a
    snapshot list of :class:`ConsumerState`.
    """

    tick: int
    creators: List[CreatorState]
    consumer_theta: np.ndarray
    consumer_delta: np.ndarray
    consumer_utility: np.ndarray
    ledger: Ledger
    rng: np.random.Generator
    seed: int = 0
    metrics_history: List[MetricsRow] = field(default_factory=list)
    accounts_history: List[TickAccounts] = field(default_factory=list)
    total_content: int = 0
    consumer_surplus: float = 0.0
    producer_surplus: float = 0.0
    gini_mode: str = "cumulative"
    items: List[Item] = field(default_factory=list)
    last_accounts: TickAccounts = field(default_factory=TickAccounts)

    @property
    def consumers(self) -> List[ConsumerState]:
        return [
            ConsumerState(i, float(t), float(d), float(u))
            for i, (t, d, u) in enumerate(zip(self.consumer_theta, self.consumer_delta,
                                               self.consumer_utility))
        ]

    @property
    def n_consumers(self) -> int:
        return len(self.consumer_theta)

    @property
    def rng_stream(self) -> np.random.Generator:
        return self.rng


def init_sim(config: SimConfig) -> SimState:
    if not isinstance(config, SimConfig):
        raise TypeError("init_sim expects a SimConfig")
    mp = config.model_params
    rng = np.random.default_rng(config.seed)
    s = config.preference_spread
    prefs = rng.uniform(1 - s, 1 + s, size=(config.n_consumers, 2))
    q0 = config.initial_quality
    if q0 is None:
        q0 = math.sqrt(mp.theta_u / mp.delta_u)
    j = config.initial_spread
    starts = rng.uniform(1 - j, 1 + j, size=(config.n_human_creators, 2))
    ai_q = rng.uniform(1 - j, 1 + j, size=config.n_ai_creators) * config.ai_quality_mean
    n_total = config.n_human_creators + config.n_ai_creators
    dirs = rng.choice(np.array([-1, 1]), size=(n_total, 2))

    creators = []
    for i, (a, b) in enumerate(starts):
        creators.append(CreatorState(
            id=i, kind=HUMAN, quality=q0 * b, price=config.initial_price * a,
            trailing_profits=deque(maxlen=config.exit_window),
            active=True, ever_active=True,
            price_dir=int(dirs[i, 0]), quality_dir=int(dirs[i, 1]),
        ))
    for k, q in enumerate(ai_q):
        i = config.n_human_creators + k
        creators.append(CreatorState(
            id=i, kind=AI, quality=float(q), price=config.ai_price,
            trailing_profits=deque(maxlen=config.exit_window),
            price_dir=int(dirs[i, 0]), quality_dir=int(dirs[i, 1]),
        ))
    return SimState(
        tick=0, creators=creators,
        consumer_theta=mp.theta_u * prefs[:, 0], consumer_delta=mp.delta_u * prefs[:, 1],
        consumer_utility=np.zeros(config.n_consumers), ledger=Ledger(), rng=rng,
        seed=config.seed, gini_mode=config.gini_mode,
    )


# ---------------------------------------------------------------- recommendation

def _slate_keys(log_quality: np.ndarray, uniforms: np.ndarray, bias: float) -> np.ndarray:
    # Gumbel-top-k: the k largest of log(w) + Gumbel noise form a sample of k
    # items without replacement with probabilities proportional to w.
    with np.errstate(divide="ignore"):
        gumbel = -np.log(-np.log(uniforms))
    return bias * log_quality + gumbel


def _top_k(keys: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` largest keys per row, largest first.

    Equal keys rank by ascending creator id, exactly as a stable sort of the
    negated keys would. Rows are partitioned first and only the ``k``
    winners are sorted; the rare row with a tie straddling the cut falls
    back to the full stable sort.
    """
    neg = -keys
    n = neg.shape[-1]
    if k >= n:
        return np.argsort(neg, axis=-1, kind="stable")
    squeeze = neg.ndim == 1
    neg = np.atleast_2d(neg)
    part = np.argpartition(neg, k - 1, axis=-1)[:, :k]
    part.sort(axis=-1)  # ascending id, so the stable sort below breaks ties by id
    chosen = np.take_along_axis(neg, part, axis=-1)
    order = np.argsort(chosen, axis=-1, kind="stable")
    out = np.take_along_axis(part, order, axis=-1)
    cut = chosen.max(axis=-1, keepdims=True)
    ambiguous = np.nonzero((neg <= cut).sum(axis=-1) > k)[0]
    if ambiguous.size:
        out[ambiguous] = np.argsort(neg[ambiguous], axis=-1, kind="stable")[:, :k]
    return out[0] if squeeze else out


def recommend(state: SimState, consumer: ConsumerState, config: SimConfig) -> List[Item]:
    """Draw one consumer's slate from the current tick's items.

    Items are sampled without replacement with probability proportional to
    ``quality ** recommend_bias``. Consumes ``len(state.items)`` uniforms,
    exactly one row of the block :func:`step` draws for all consumers.
    """
    items = state.items
    if not items:
        raise SimStateError("no active creator has published an item this tick")
    logq = np.log([it.quality for it in items])
    u = state.rng.random(len(items))
    idx = _top_k(_slate_keys(logq, u, config.recommend_bias), config.slate_size)
    return [items[i] for i in idx]


# ------------------------------------------------------------------ consumption

def overload_multiplier(total_content: float, overload_threshold: float) -> float:
    return 1.0 + max(0.0, total_content - overload_threshold) / overload_threshold


class Choice(NamedTuple):
    index: Optional[int]
    utility: float


def consumer_choose(consumer: ConsumerState, slate: Sequence[Item], total_content: int,
                    config: SimConfig) -> Choice:
    """Pick the slate item with the best positive score, or nothing."""
    if not slate:
        raise ValueError("slate is empty")
    m = overload_multiplier(total_content, config.overload_threshold)
    best, best_score = None, -math.inf
    for i, it in enumerate(slate):
        score = (consumer.theta_u * math.log(it.quality)
                 - 0.5 * consumer.delta_u * m * it.quality ** 2
                 - config.price_sensitivity * it.price)
        if score > best_score:
            best, best_score = i, score
    if best_score > 0:
        return Choice(best, best_score)
    return Choice(None, 0.0)


# ------------------------------------------------------------------- creators

def creator_adjust(creator: CreatorState, last_profit: float, prev_profit: Optional[float],
                   config: SimConfig) -> CreatorState:
    """One hill-climbing move on price or quality.

    The variable perturbed last keeps its direction if profit improved and
    reverses otherwise; the other variable is perturbed next, by
    ``learning_rate`` times its current value (never less than
    ``learning_rate * min_step``, so a price at the floor can recover).
    """
    c = creator.clone()
    _adjust(c, last_profit, prev_profit, config)
    return c


def _adjust(c: CreatorState, last_profit, prev_profit, config: SimConfig) -> None:
    if c.last_moved is not None and prev_profit is not None and not last_profit > prev_profit:
        if c.last_moved == "price":
            c.price_dir = -c.price_dir
        else:
            c.quality_dir = -c.quality_dir
    target = "quality" if c.last_moved == "price" else "price"
    lr = config.learning_rate
    if target == "price":
        step = lr * max(c.price, config.min_step)
        c.price = max(0.0, c.price + c.price_dir * step)
    else:
        step = lr * max(c.quality, config.min_step)
        c.quality = max(QUALITY_FLOOR, c.quality + c.quality_dir * step)
    c.last_moved = target


def exit_check(creator: CreatorState, config: SimConfig) -> CreatorState:
    """Deactivate a human creator whose trailing mean profit is below threshold."""
    if _should_exit(creator, config):
        c = creator.clone()
        c.active = False
        return c
    return creator


def _should_exit(c: CreatorState, config: SimConfig) -> bool:
    if not c.is_human or not c.active:
        return False
    profits = c.trailing_profits
    if len(profits) < config.exit_window:
        return False
    return sum(profits) / len(profits) < config.exit_threshold


# ------------------------------------------------------------------------ step

def step(state: SimState, config: SimConfig) -> SimState:
    """Advance the simulation by one tick, in place, and return the state."""
    if state.tick >= config.steps:
        raise SimStateError(f"simulation already ran its {config.steps} steps")
    mp = config.model_params
    creators = state.creators

    # 1. AI activation
    if state.tick >= config.introduce_ai_step:
        for c in creators:
            if not c.is_human and not c.active:
                c.active = c.ever_active = True

    # 2. production
    items = [Item(c.id, c.quality, c.price) for c in creators if c.active]
    for c in creators:
        if c.active:
            c.content_count += 1
            if not c.is_human:
                c.quality = max(QUALITY_FLOOR, c.quality + config.ai_quality_growth)
    state.items = items
    state.total_content += len(items)

    n_items = len(items)
    n_cons = state.n_consumers
    sales = np.zeros(n_items, dtype=np.int64)
    utilities = np.zeros(n_cons)

    # 3-4. recommendation and consumption, vectorized over consumers
    if n_items and n_cons:
        quality = np.array([it.quality for it in items])
        price = np.array([it.price for it in items])
        u = state.rng.random((n_cons, n_items))
        slates = _top_k(_slate_keys(np.log(quality), u, config.recommend_bias),
                        config.slate_size)
        m = overload_multiplier(state.total_content, config.overload_threshold)
        q = quality[slates]
        scores = (state.consumer_theta[:, None] * np.log(q)
                  - 0.5 * (state.consumer_delta * m)[:, None] * q * q
                  - config.price_sensitivity * price[slates])
        best = np.argmax(scores, axis=1)
        rows = np.arange(n_cons)
        best_score = scores[rows, best]
        buys = best_score > 0
        utilities = np.where(buys, best_score, 0.0)
        sales = np.bincount(slates[rows, best][buys], minlength=n_items)
        state.consumer_utility += utilities

    # 5. settlement
    fee_rate = config.platform_fee
    acc = TickAccounts(tick=state.tick, n_items=n_items)
    for it, n_sold in zip(items, sales):
        c = creators[it.creator_id]
        gross = it.price * int(n_sold)
        fee = gross * fee_rate
        net = gross - fee
        if c.is_human:
            subsidy = config.subsidy
            cost = human_cost(it.quality, mp)
        else:
            subsidy = 0.0
            cost = mp.c_ai
        profit = net + subsidy - cost
        c.cumulative_revenue += gross
        c.trailing_profits.append(profit)
        acc.creator_gross[c.id] = gross
        acc.consumer_payments += gross
        acc.gross += gross
        acc.net += net
        acc.fees += fee
        acc.subsidies += subsidy
        acc.costs += cost
        acc.profit += profit
    acc.purchases = int(sales.sum())
    acc.utility = float(utilities.sum())
    if n_items:
        acc.avg_quality = float(np.mean([it.quality for it in items]))
        acc.avg_price = float(np.mean([it.price for it in items]))
    acc.avg_utility = acc.utility / n_cons if n_cons else 0.0
    state.ledger.fees_collected += acc.fees
    state.ledger.subsidies_paid += acc.subsidies
    state.consumer_surplus += acc.utility
    state.producer_surplus += acc.profit

    # 6-7. adjustment and exit
    for c in creators:
        if not (c.active and c.is_human):
            continue
        last = c.trailing_profits[-1]
        _adjust(c, last, c.last_profit, config)
        c.last_profit = last
        if _should_exit(c, config):
            c.active = False

    # 8. metrics
    state.last_accounts = acc
    state.accounts_history.append(acc)
    state.metrics_history.append(record_tick(state))
    state.tick += 1
    return state


def run(config: SimConfig) -> SimState:
    state = init_sim(config)
    for _ in range(config.steps):
        step(state, config)
    return state

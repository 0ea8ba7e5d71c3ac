"""Single-price call-auction exchange.

All orders submitted during a trading session rest in the book; the session
then clears at one price where the cumulative demand and supply curves
intersect.  The demand at price p is the total remaining size of buy orders
with limit >= p (non-increasing in p); the supply is the total remaining size
of sell orders with limit <= p (non-decreasing).  Both curves are step
functions, so the intersection needs a case analysis:

* buy cross   -- the demand curve is vertical at the intersection: sellers at
  or below P* fill completely, buyers at exactly P* are rationed FIFO.
* sell cross  -- mirror image: buyers fill completely, sellers at P* rationed.
* mixed cross -- both sides have orders at P*; whichever side has the larger
  volume at P* is rationed (delta == 0 is the exact match).

The clearing volume V* is the maximum of min(demand, supply) over submitted
limit prices.  That maximum is generally attained on an interval of prices;
P* is pinned to the price level of the rationed side (the highest maximizer
when buyers are rationed, the lowest when sellers are).  When demand and
supply balance exactly and no common price level exists, the convention here
is to settle at the marginal buy level with delta == 0.

Every fill settles at the uniform price P*; delta reports the volume left
unfilled at the marginal level.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Side(Enum):
    BUY = "buy"
    SELL = "sell"


class CrossType(Enum):
    NONE = "none"
    BUY = "buy"
    SELL = "sell"
    MIXED = "mixed"


class OrderError(Exception):
    """Base class for order submission rejections."""


class InvalidPriceOrSize(OrderError):
    pass


class OpenOrderExists(OrderError):
    pass


class InsufficientCash(OrderError):
    pass


class InsufficientShares(OrderError):
    pass


@dataclass(slots=True)
class Order:
    """A resting limit order; order_id encodes arrival priority."""

    order_id: int
    client_id: int
    side: Side
    limit_price: float
    size: int
    remaining: int


@dataclass(frozen=True, slots=True)
class Trade:
    buy_order_id: int
    sell_order_id: int
    quantity: int
    price: float


@dataclass(frozen=True, slots=True)
class ClearingResult:
    cross_type: CrossType
    p_star: float | None
    v_star: int
    delta: int
    trades: tuple[Trade, ...] = ()

    @property
    def crossed(self) -> bool:
        return self.cross_type is not CrossType.NONE


NO_CROSS = ClearingResult(CrossType.NONE, None, 0, 0, ())


@dataclass(slots=True)
class ClientRecord:
    """Portfolio snapshot of one client (read-only view of the book)."""

    client_id: int
    cash: float
    shares: int
    open_order_id: int | None


class ClientBook:
    """Cash and share holdings of every client, one open order per client.

    Holdings are stored in dense arrays indexed by client_id so the
    simulation can apply per-step accruals and wealth snapshots without a
    Python loop.
    """

    def __init__(self, cash, shares):
        self.cash = np.asarray(cash, dtype=np.float64).copy()
        self.shares = np.asarray(shares, dtype=np.int64).copy()
        if self.cash.shape != self.shares.shape or self.cash.ndim != 1:
            raise ValueError("cash and shares must be 1-d arrays of equal length")
        if np.any(self.cash < 0) or np.any(self.shares < 0):
            raise ValueError("holdings must be non-negative")
        # -1 encodes "no open order"
        self.open_order = np.full(len(self.cash), -1, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.cash)

    def __contains__(self, client_id: int) -> bool:
        return 0 <= client_id < len(self.cash)

    def record(self, client_id: int) -> ClientRecord:
        if client_id not in self:
            raise KeyError(f"unknown client {client_id}")
        oid = int(self.open_order[client_id])
        return ClientRecord(
            client_id=client_id,
            cash=float(self.cash[client_id]),
            shares=int(self.shares[client_id]),
            open_order_id=None if oid < 0 else oid,
        )

    def total_cash(self) -> float:
        return float(np.sum(self.cash))

    def total_shares(self) -> int:
        return int(np.sum(self.shares))

    def wealth(self, price: float) -> np.ndarray:
        return self.cash + self.shares * price


class OrderBook:
    """Price-sorted buy and sell books with FIFO queues per level.

    Order ids come from a monotone counter that survives purges, so ids are
    globally ordered by arrival for the lifetime of the book.
    """

    def __init__(self):
        self._buys: dict[float, list[Order]] = {}
        self._sells: dict[float, list[Order]] = {}
        self._next_order_id = 1

    # -- submission ---------------------------------------------------------

    def submit(self, clients: ClientBook, client_id: int, side: Side,
               limit_price: float, size: int) -> int:
        """Validate and enqueue a limit order; returns the new order id."""
        if client_id not in clients:
            raise KeyError(f"unknown client {client_id}")
        if not (limit_price > 0.0) or not np.isfinite(limit_price) or size < 1:
            raise InvalidPriceOrSize(
                f"limit_price={limit_price!r} size={size!r}")
        if clients.open_order[client_id] >= 0:
            raise OpenOrderExists(
                f"client {client_id} already has order "
                f"{int(clients.open_order[client_id])}")
        if side is Side.BUY:
            if size * limit_price > clients.cash[client_id]:
                raise InsufficientCash(
                    f"client {client_id}: {size}x{limit_price} exceeds cash "
                    f"{float(clients.cash[client_id])}")
        else:
            if size > clients.shares[client_id]:
                raise InsufficientShares(
                    f"client {client_id}: {size} exceeds holdings "
                    f"{int(clients.shares[client_id])}")

        order_id = self._next_order_id
        self._next_order_id += 1
        order = Order(order_id, client_id, side, float(limit_price),
                      int(size), int(size))
        levels = self._buys if side is Side.BUY else self._sells
        levels.setdefault(order.limit_price, []).append(order)
        clients.open_order[client_id] = order_id
        return order_id

    # -- curve queries ------------------------------------------------------

    def demand_at(self, p: float) -> int:
        """Total remaining buy volume with limit >= p."""
        return sum(o.remaining for price, level in self._buys.items()
                   if price >= p for o in level)

    def supply_at(self, p: float) -> int:
        """Total remaining sell volume with limit <= p."""
        return sum(o.remaining for price, level in self._sells.items()
                   if price <= p for o in level)

    def open_orders(self) -> list[Order]:
        out = [o for level in self._buys.values() for o in level]
        out += [o for level in self._sells.values() for o in level]
        return out

    def is_empty(self) -> bool:
        return not self._buys and not self._sells

    # -- matching -----------------------------------------------------------

    def _curves(self):
        """Sorted level prices with cumulative volumes for both sides.

        Returns (buy_prices asc, demand-at-those-prices, sell_prices asc,
        supply-at-those-prices) as numpy arrays.
        """
        bp = np.array(sorted(self._buys), dtype=np.float64)
        bvol = np.array([sum(o.remaining for o in self._buys[p]) for p in bp],
                        dtype=np.int64)
        # demand at level price i = all buy volume at that price and above
        dcum = np.cumsum(bvol[::-1])[::-1] if len(bp) else bvol
        sp = np.array(sorted(self._sells), dtype=np.float64)
        svol = np.array([sum(o.remaining for o in self._sells[p]) for p in sp],
                        dtype=np.int64)
        scum = np.cumsum(svol) if len(sp) else svol
        return bp, dcum, sp, scum

    def find_cross(self) -> ClearingResult:
        """Locate the supply/demand intersection without touching state."""
        bp, dcum, sp, scum = self._curves()
        if len(bp) == 0 or len(sp) == 0 or bp[-1] < sp[0]:
            return NO_CROSS

        candidates = np.union1d(bp, sp)
        # demand at candidate p: cumulative buy volume of levels >= p
        bidx = np.searchsorted(bp, candidates, side="left")
        d_at = np.where(bidx < len(bp), dcum[np.minimum(bidx, len(bp) - 1)], 0)
        # supply at candidate p: cumulative sell volume of levels <= p
        sidx = np.searchsorted(sp, candidates, side="right") - 1
        s_at = np.where(sidx >= 0, scum[np.maximum(sidx, 0)], 0)

        volumes = np.minimum(d_at, s_at)
        v_star = int(volumes.max())
        if v_star == 0:
            return NO_CROSS

        maximizers = np.flatnonzero(volumes == v_star)
        i_lo, i_hi = maximizers[0], maximizers[-1]
        p_lo, p_hi = float(candidates[i_lo]), float(candidates[i_hi])

        if d_at[i_hi] > s_at[i_hi]:
            # excess demand: buyers rationed at the marginal buy level
            p_star = p_hi
            delta = int(d_at[i_hi] - s_at[i_hi])
            kind = CrossType.MIXED if p_star in self._sells else CrossType.BUY
        elif s_at[i_lo] > d_at[i_lo]:
            # excess supply: sellers rationed at the marginal sell level
            p_star = p_lo
            delta = int(s_at[i_lo] - d_at[i_lo])
            kind = CrossType.MIXED if p_star in self._buys else CrossType.SELL
        else:
            # exact volume balance; a shared price level is the exact-match
            # mixed cross, otherwise settle at the marginal buy level
            delta = 0
            if p_lo == p_hi and p_hi in self._buys and p_hi in self._sells:
                p_star, kind = p_hi, CrossType.MIXED
            else:
                p_star, kind = p_hi, CrossType.BUY
        return ClearingResult(kind, p_star, v_star, delta, ())

    def _fill_side(self, levels: dict[float, list[Order]],
                   prices_best_first: list[float],
                   volume: int) -> list[tuple[Order, int]]:
        """Walk levels best-price-first, FIFO within each, taking `volume`."""
        fills: list[tuple[Order, int]] = []
        left = volume
        for price in prices_best_first:
            if left == 0:
                break
            for order in levels[price]:
                if left == 0:
                    break
                qty = min(order.remaining, left)
                fills.append((order, qty))
                left -= qty
        return fills

    def clear(self, clients: ClientBook) -> ClearingResult:
        """Fill the crossing orders and settle all trades at P*.

        Buy orders above P* and sell orders below P* fill completely; the
        marginal level fills FIFO by order id, possibly leaving its last
        touched order partially filled in the book.  Buyers pay and sellers
        receive the uniform price P* regardless of their limits.
        """
        cross = self.find_cross()
        if not cross.crossed:
            return cross
        v_star = cross.v_star

        buy_fills = self._fill_side(
            self._buys, sorted(self._buys, reverse=True), v_star)
        sell_fills = self._fill_side(
            self._sells, sorted(self._sells), v_star)

        trades = self._pair_trades(buy_fills, sell_fills, cross.p_star)

        for order, qty in buy_fills:
            clients.cash[order.client_id] -= qty * cross.p_star
            clients.shares[order.client_id] += qty
            self._consume(self._buys, clients, order, qty)
        for order, qty in sell_fills:
            clients.cash[order.client_id] += qty * cross.p_star
            clients.shares[order.client_id] -= qty
            self._consume(self._sells, clients, order, qty)

        return ClearingResult(cross.cross_type, cross.p_star, v_star,
                              cross.delta, trades)

    @staticmethod
    def _pair_trades(buy_fills, sell_fills, price) -> tuple[Trade, ...]:
        trades = []
        bi = si = 0
        bleft = buy_fills[0][1] if buy_fills else 0
        sleft = sell_fills[0][1] if sell_fills else 0
        while bi < len(buy_fills) and si < len(sell_fills):
            qty = min(bleft, sleft)
            trades.append(Trade(buy_fills[bi][0].order_id,
                                sell_fills[si][0].order_id, qty, price))
            bleft -= qty
            sleft -= qty
            if bleft == 0:
                bi += 1
                bleft = buy_fills[bi][1] if bi < len(buy_fills) else 0
            if sleft == 0:
                si += 1
                sleft = sell_fills[si][1] if si < len(sell_fills) else 0
        return tuple(trades)

    def _consume(self, levels, clients: ClientBook, order: Order, qty: int):
        order.remaining -= qty
        if order.remaining == 0:
            level = levels[order.limit_price]
            level.remove(order)
            if not level:
                del levels[order.limit_price]
            clients.open_order[order.client_id] = -1

    # -- end of session -----------------------------------------------------

    def purge(self, clients: ClientBook) -> int:
        """Drop every resting order; holdings are untouched."""
        removed = 0
        for levels in (self._buys, self._sells):
            for level in levels.values():
                for order in level:
                    clients.open_order[order.client_id] = -1
                    removed += 1
            levels.clear()
        return removed

    # -- debug / export -----------------------------------------------------

    def dump(self) -> str:
        """One order per line, `order_id,side,price,remaining,client_id`,
        buys first (best price first), then sells, FIFO within each level."""
        lines = []
        for price in sorted(self._buys, reverse=True):
            for o in self._buys[price]:
                lines.append(f"{o.order_id},buy,{o.limit_price:.17g},"
                             f"{o.remaining},{o.client_id}")
        for price in sorted(self._sells):
            for o in self._sells[price]:
                lines.append(f"{o.order_id},sell,{o.limit_price:.17g},"
                             f"{o.remaining},{o.client_id}")
        return "\n".join(lines)


CLEARING_CSV_HEADER = "t,cross_type,p_star,v_star,delta"


def clearing_csv_row(t: int, result: ClearingResult) -> str:
    """Serialize one auction outcome as a CSV row."""
    p = "" if result.p_star is None else f"{result.p_star:.17g}"
    return f"{t},{result.cross_type.value},{p},{result.v_star},{result.delta}"

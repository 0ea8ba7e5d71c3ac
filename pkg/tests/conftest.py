import numpy as np
import pytest

from sentmarket.exchange import ClientBook, OrderBook, Side


def make_market(n_clients=64, cash=1e12, shares=10**9):
    """Order book plus clients rich enough to never fail validation."""
    clients = ClientBook(np.full(n_clients, cash),
                         np.full(n_clients, shares, dtype=np.int64))
    return OrderBook(), clients


def submit_many(book, clients, buys=(), sells=()):
    """Submit (price, size) pairs, one client per order; returns id lists."""
    next_client = iter(range(len(clients)))
    buy_ids = [book.submit(clients, next(next_client), Side.BUY, p, s)
               for p, s in buys]
    sell_ids = [book.submit(clients, next(next_client), Side.SELL, p, s)
                for p, s in sells]
    return buy_ids, sell_ids


@pytest.fixture
def market():
    return make_market()

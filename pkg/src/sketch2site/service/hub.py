"""Broadcast hub: one publisher sequence point, per-client bounded queues.

Slow clients drop intermediate updates and keep the newest; a preview
that skips frames is better than one that lags.
"""

from __future__ import annotations

import asyncio
from typing import Optional

from .models import UpdateMessage


class BroadcastHub:
    def __init__(self, queue_size: int = 16):
        self.queue_size = queue_size
        self._seq = 0
        self._latest: Optional[tuple[int, str]] = None
        self._clients: dict[int, asyncio.Queue] = {}
        self._next_id = 0
        self._lock = asyncio.Lock()

    @property
    def seq(self) -> int:
        return self._seq

    @property
    def latest(self) -> Optional[tuple[int, str]]:
        return self._latest

    @property
    def client_count(self) -> int:
        return len(self._clients)

    async def publish(self, payload: str) -> int:
        async with self._lock:
            self._seq += 1
            seq = self._seq
            self._latest = (seq, payload)
            message = UpdateMessage(kind="dsl_update", seq=seq, payload=payload)
            for queue in self._clients.values():
                try:
                    queue.put_nowait(message)
                except asyncio.QueueFull:
                    try:
                        queue.get_nowait()
                    except asyncio.QueueEmpty:
                        pass
                    queue.put_nowait(message)
            return seq

    def seed_initial(self, payload: str) -> int:
        """Synchronously install a first document (pre-serve, no clients)."""
        if self._clients:
            raise RuntimeError("seed_initial is only valid before clients connect")
        self._seq += 1
        self._latest = (self._seq, payload)
        return self._seq

    def register(self) -> tuple[int, asyncio.Queue]:
        self._next_id += 1
        queue: asyncio.Queue = asyncio.Queue(maxsize=self.queue_size)
        self._clients[self._next_id] = queue
        return self._next_id, queue

    def unregister(self, client_id: int) -> None:
        self._clients.pop(client_id, None)

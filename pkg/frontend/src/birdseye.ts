// Bird's-eye view: an abstract labeled room grid laid out breadth-first
// from the start room along adjacency directions. Clicks send the raw
// target; the server decides what, if anything, they mean.

import { ProtocolClient, StateData } from "./protocol.js";

const OFFSETS: Record<string, [number, number]> = {
  north: [0, -1],
  south: [0, 1],
  east: [1, 0],
  west: [-1, 0],
};

export interface GridCell {
  room: string;
  x: number;
  y: number;
}

export function layoutRooms(state: StateData): GridCell[] {
  const position = new Map<string, [number, number]>();
  position.set(state.start, [0, 0]);
  const taken = new Set(["0,0"]);
  const queue = [state.start];
  while (queue.length > 0) {
    const room = queue.shift()!;
    const [x, y] = position.get(room)!;
    for (const [from, direction, to] of state.adjacency) {
      if (from !== room || position.has(to)) {
        continue;
      }
      const [dx, dy] = OFFSETS[direction];
      let [nx, ny] = [x + dx, y + dy];
      while (taken.has(`${nx},${ny}`)) {
        nx += dx === 0 ? 1 : dx; // nudge collisions aside deterministically
        ny += dx === 0 && dy === 0 ? 1 : 0;
      }
      position.set(to, [nx, ny]);
      taken.add(`${nx},${ny}`);
      queue.push(to);
    }
  }
  // rooms unreachable by adjacency go in a row below the laid-out map
  let spare = 0;
  const maxY = Math.max(...Array.from(position.values(), ([, y]) => y));
  for (const room of state.rooms) {
    if (!position.has(room)) {
      position.set(room, [spare++, maxY + 2]);
    }
  }
  return Array.from(position, ([room, [x, y]]) => ({ room, x, y }));
}

export interface BirdseyeView {
  root: HTMLElement;
  refresh(): Promise<void>;
  settle(): Promise<void>;
  playerRoom(): string | null;
  hintText(): string;
}

export function mountBirdseye(
  root: HTMLElement,
  client: ProtocolClient,
  session: string,
): BirdseyeView {
  const doc = root.ownerDocument;
  const hint = doc.createElement("div");
  hint.className = "hint";
  const grid = doc.createElement("div");
  grid.className = "grid";
  root.replaceChildren(hint, grid);

  let pending: Promise<void> = Promise.resolve();
  let busy = false;

  function render(state: StateData): void {
    grid.replaceChildren();
    const byRoom = new Map<string, string[]>();
    for (const [entity, location] of Object.entries(state.locations)) {
      if (location !== "inventory") {
        byRoom.set(location, [...(byRoom.get(location) ?? []), entity]);
      }
    }
    for (const cell of layoutRooms(state)) {
      const box = doc.createElement("div");
      box.className = "room";
      box.dataset.room = cell.room;
      box.style.gridColumnStart = String(cell.x + 10);
      box.style.gridRowStart = String(cell.y + 10);
      const label = doc.createElement("strong");
      label.textContent = cell.room;
      box.appendChild(label);
      if (state.player_room === cell.room) {
        const marker = doc.createElement("span");
        marker.className = "player";
        marker.textContent = "@";
        box.appendChild(marker);
      }
      for (const entity of (byRoom.get(cell.room) ?? []).sort()) {
        const sprite = doc.createElement("span");
        sprite.className = "entity";
        sprite.dataset.entity = entity;
        sprite.textContent = entity;
        sprite.addEventListener("click", (event) => {
          event.stopPropagation();
          send(entity);
        });
        box.appendChild(sprite);
      }
      box.addEventListener("click", () => send(cell.room));
      grid.appendChild(box);
    }
  }

  function send(target: string): void {
    if (busy) {
      return;
    }
    busy = true;
    pending = (async () => {
      try {
        const outcome = await client.click(session, target);
        if ("rejected" in outcome) {
          hint.textContent = `${target}: ${outcome.rejected}`;
        } else {
          hint.textContent =
            outcome.verdict === "success" ? "" : outcome.message;
        }
        render(await client.getState(session));
      } catch (error) {
        hint.textContent = `connection trouble: ${String(error)}`;
      } finally {
        busy = false;
      }
    })();
  }

  return {
    root,
    async refresh() {
      render(await client.getState(session));
    },
    settle: () => pending,
    playerRoom: () =>
      grid.querySelector(".player")?.closest<HTMLElement>(".room")?.dataset
        .room ?? null,
    hintText: () => hint.textContent ?? "",
  };
}

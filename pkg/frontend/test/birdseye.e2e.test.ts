// @vitest-environment jsdom
//
// Bird's-eye grid against the real engine: clicks go to the server raw,
// the server elaborates them, and the player marker follows the state.

import { afterAll, beforeAll, expect, test } from "vitest";

import { layoutRooms, mountBirdseye } from "../src/birdseye.js";
import { ProtocolClient } from "../src/protocol.js";
import { Engine, startEngine } from "./engine.js";

let engine: Engine;

beforeAll(async () => {
  engine = await startEngine();
}, 30000);

afterAll(() => {
  engine?.stop();
});

async function openView() {
  const client = new ProtocolClient(engine.endpoint, globalThis.fetch);
  const opened = await client.newSession(
    engine.worldPath("move_take.world"),
    "birdseye",
    0,
  );
  const root = document.createElement("div");
  document.body.appendChild(root);
  const view = mountBirdseye(root, client, opened.session);
  await view.refresh();
  return { client, view, session: opened.session };
}

function clickRoom(view: { root: HTMLElement }, room: string) {
  const box = view.root.querySelector<HTMLElement>(`[data-room="${room}"]`);
  expect(box, `room ${room} should be rendered`).not.toBeNull();
  box!.dispatchEvent(new window.MouseEvent("click", { bubbles: true }));
}

test("clicking an adjacent room moves the player marker", async () => {
  const { view } = await openView();
  expect(view.playerRoom()).toBe("lab");
  clickRoom(view, "library");
  await view.settle();
  expect(view.playerRoom()).toBe("library");
}, 30000);

test("clicking a far room shows an out-of-range hint", async () => {
  const { view } = await openView();
  clickRoom(view, "library");
  await view.settle();
  clickRoom(view, "quarters"); // not adjacent to the library
  await view.settle();
  expect(view.playerRoom()).toBe("library");
  expect(view.hintText()).toContain("out-of-range");
}, 30000);

test("clicking the player's own room is a no-op hint", async () => {
  const { view } = await openView();
  clickRoom(view, "lab");
  await view.settle();
  expect(view.playerRoom()).toBe("lab");
  expect(view.hintText()).toContain("no-op");
}, 30000);

test("clicking an item in the room takes it off the map", async () => {
  const { view } = await openView();
  const flask = view.root.querySelector<HTMLElement>('[data-entity="flask"]');
  expect(flask).not.toBeNull();
  flask!.dispatchEvent(new window.MouseEvent("click", { bubbles: true }));
  await view.settle();
  expect(view.root.querySelector('[data-entity="flask"]')).toBeNull();
}, 30000);

test("grid layout places rooms along adjacency directions", () => {
  const cells = layoutRooms({
    player_room: "lab",
    day: 0,
    rooms: ["lab", "library", "quarters", "courtyard"],
    start: "lab",
    adjacency: [
      ["lab", "south", "library"],
      ["lab", "east", "quarters"],
      ["lab", "west", "courtyard"],
      ["library", "north", "lab"],
      ["quarters", "west", "lab"],
      ["courtyard", "east", "lab"],
    ],
    locations: {},
    entities: {},
    inventory: [],
    selected: null,
    digest: "",
  });
  const at = new Map(cells.map((c) => [c.room, [c.x, c.y]]));
  expect(at.get("lab")).toEqual([0, 0]);
  expect(at.get("library")).toEqual([0, 1]);
  expect(at.get("quarters")).toEqual([1, 0]);
  expect(at.get("courtyard")).toEqual([-1, 0]);
});

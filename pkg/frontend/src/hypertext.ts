// Hypertext view: the page is exactly the server's current choice list.
// Links are never synthesized locally; every affordance shown came from
// the last list_intents reply.

import {
  Choice,
  ProtocolClient,
  StepData,
  formatResponse,
} from "./protocol.js";

export interface HypertextView {
  root: HTMLElement;
  refresh(): Promise<void>;
  settle(): Promise<void>;
  transcriptLines(): string[];
  linkIds(): string[];
}

export function mountHypertext(
  root: HTMLElement,
  client: ProtocolClient,
  session: string,
): HypertextView {
  const doc = root.ownerDocument;
  const banner = doc.createElement("div");
  banner.className = "banner";
  banner.hidden = true;
  const transcript = doc.createElement("ol");
  transcript.className = "transcript";
  const linkList = doc.createElement("ul");
  linkList.className = "choices";
  root.replaceChildren(banner, transcript, linkList);

  let choices: Choice[] = [];
  let pending: Promise<void> = Promise.resolve();
  let busy = false;

  function renderChoices(): void {
    linkList.replaceChildren();
    if (choices.length === 0) {
      const item = doc.createElement("li");
      item.textContent = "no actions available";
      linkList.appendChild(item);
      return;
    }
    for (const choice of choices) {
      const item = doc.createElement("li");
      const link = doc.createElement("a");
      link.href = "#";
      link.dataset.choiceId = choice.id;
      link.dataset.intent = choice.intent;
      link.textContent = choice.id;
      if (busy) {
        link.setAttribute("aria-disabled", "true");
      }
      link.addEventListener("click", (event) => {
        event.preventDefault();
        follow(choice);
      });
      item.appendChild(link);
      linkList.appendChild(item);
    }
  }

  function appendTranscript(playerLine: string, step: StepData): void {
    const player = doc.createElement("li");
    player.textContent = `PLAYER: ${playerLine}`;
    const game = doc.createElement("li");
    game.dataset.verdict = step.verdict;
    game.textContent = `GAME: ${formatResponse(step)}`;
    transcript.append(player, game);
  }

  function follow(choice: Choice): void {
    if (busy) {
      return;
    }
    busy = true;
    renderChoices();
    pending = (async () => {
      try {
        const step = await client.step(session, choice.intent);
        appendTranscript(choice.id, step);
        choices = await client.listIntents(session);
        banner.hidden = true;
      } catch (error) {
        // transport failure: report, keep local state untouched
        banner.textContent = `connection trouble: ${String(error)}`;
        banner.hidden = false;
      } finally {
        busy = false;
        renderChoices();
      }
    })();
  }

  return {
    root,
    async refresh() {
      choices = await client.listIntents(session);
      renderChoices();
    },
    settle: () => pending,
    transcriptLines: () =>
      Array.from(transcript.children, (node) => node.textContent ?? ""),
    linkIds: () =>
      Array.from(
        linkList.querySelectorAll<HTMLAnchorElement>("a[data-choice-id]"),
        (a) => a.dataset.choiceId ?? "",
      ),
  };
}

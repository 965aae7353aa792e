// Typed client for the engine's JSON protocol (HTTP mode: one message per
// POST, same schema as the line-delimited transport).

export interface Choice {
  id: string;
  label: string;
  intent: string;
}

export interface StepData {
  index: number;
  intent: string;
  verdict: "success" | "failure";
  message: string;
  payload: [string, string][];
  digest: string;
}

export interface ClickRejectedData {
  rejected: string;
  target: string;
}

export interface SessionData {
  session: string;
  world_ref: string;
  digest: string;
  player_room: string;
}

export interface StateData {
  player_room: string;
  day: number;
  rooms: string[];
  start: string;
  adjacency: [string, string, string][];
  locations: Record<string, string>;
  entities: Record<string, string>;
  inventory: string[];
  selected: string | null;
  digest: string;
}

export interface TraceEntryData {
  i: number;
  intent: string;
  verdict: string;
  message: string;
  digest: string;
}

export interface TraceData {
  world_ref: string;
  seed: number;
  entries: TraceEntryData[];
}

export type Reply<T> =
  | { ok: true; data: T }
  | { ok: false; error: { code: string; message: string } };

export class ProtocolError extends Error {
  constructor(
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export type MessageLogger = (request: object, reply: Reply<unknown>) => void;

export class ProtocolClient {
  constructor(
    private endpoint: string,
    private fetchImpl: typeof fetch = globalThis.fetch,
    private logger?: MessageLogger,
  ) {}

  async send<T>(message: Record<string, unknown>): Promise<T> {
    const response = await this.fetchImpl(this.endpoint, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(message),
    });
    const reply = (await response.json()) as Reply<T>;
    this.logger?.(message, reply as Reply<unknown>);
    if (!reply.ok) {
      throw new ProtocolError(reply.error.code, reply.error.message);
    }
    return reply.data;
  }

  newSession(world: string, profile: string, seed: number): Promise<SessionData> {
    return this.send({ op: "new_session", world, profile, seed });
  }

  async listIntents(session: string): Promise<Choice[]> {
    const data = await this.send<{ choices: Choice[] }>({
      op: "list_intents",
      session,
    });
    return data.choices;
  }

  step(session: string, intent: string): Promise<StepData> {
    return this.send({ op: "step", session, intent });
  }

  click(session: string, target: string): Promise<StepData | ClickRejectedData> {
    return this.send({ op: "click", session, target });
  }

  getState(session: string): Promise<StateData> {
    return this.send({ op: "get_state", session });
  }

  getTrace(session: string): Promise<TraceData> {
    return this.send({ op: "get_trace", session });
  }
}

export function formatResponse(step: StepData): string {
  const tag = step.verdict === "success" ? "ok" : "fail";
  let line = `${tag}: ${step.message}`;
  if (step.payload.length > 0) {
    line += ` [${step.payload.map(([type]) => type).join(", ")}]`;
  }
  return line;
}

// Session client: one receive loop feeding the view model, commands sent
// fire-and-forget with acknowledgment tracking by command id.

import { Ack, Command, ErrorMessage, parseServerMessage } from "./protocol.js";
import { SessionView } from "./view.js";

/** The subset of the browser WebSocket API the client needs; the `ws`
 * package used in tests implements it too. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "close", listener: () => void): void;
  addEventListener(
    type: "message",
    listener: (event: { data: unknown }) => void
  ): void;
}

export interface AckRecord {
  id: number;
  command: string;
  /** Latest snapshot tick known when the command was sent. */
  sentAtTick: number;
  /** Tick the service applied the command at, once acknowledged. */
  ackTick: number | null;
}

export class SessionClient {
  readonly view: SessionView;
  readonly acks: AckRecord[] = [];
  onError: ((err: ErrorMessage) => void) | null = null;
  private socket: SocketLike;
  private nextId = 1;
  private waiting = new Map<number, (ack: Ack) => void>();
  private now: () => number;

  constructor(socket: SocketLike, view?: SessionView, now?: () => number) {
    this.socket = socket;
    this.view = view ?? new SessionView();
    this.now = now ?? (() => Date.now());
    socket.addEventListener("message", (event) => {
      this.handleMessage(String(event.data));
    });
    socket.addEventListener("close", () => {
      this.view.status = "closed";
    });
  }

  handleMessage(text: string): void {
    let msg;
    try {
      msg = parseServerMessage(text);
    } catch {
      return;
    }
    if (msg.type === "hello") {
      this.view.setHello(msg);
    } else if (msg.type === "state") {
      this.view.pushSnapshot(msg, this.now());
    } else if (msg.type === "ack") {
      this.resolveAck(msg);
    } else if (this.onError) {
      this.onError(msg);
    }
  }

  /** Send a command; resolves with the service's tick-stamped ack. */
  send(command: Command): Promise<Ack> {
    const id = this.nextId++;
    const record: AckRecord = {
      id,
      command: command.type,
      sentAtTick: this.view.snapshot ? this.view.snapshot.tick : -1,
      ackTick: null,
    };
    this.acks.push(record);
    const promise = new Promise<Ack>((resolve) => {
      this.waiting.set(id, resolve);
    });
    this.socket.send(JSON.stringify({ ...command, id }));
    return promise;
  }

  private resolveAck(ack: Ack): void {
    const record = this.acks.find((r) => r.id === ack.id);
    if (record) record.ackTick = ack.tick;
    if (typeof ack.id === "number") {
      const resolve = this.waiting.get(ack.id);
      if (resolve) {
        this.waiting.delete(ack.id);
        resolve(ack);
      }
    }
  }

  close(): void {
    this.socket.close();
  }
}

/** Build the session URL from page query parameters (host, port). */
export function sessionUrl(query: string, defaults = { host: "127.0.0.1", port: 8765 }): string {
  const params = new URLSearchParams(query);
  const host = params.get("host") ?? defaults.host;
  const port = params.get("port") ?? String(defaults.port);
  return `ws://${host}:${port}`;
}

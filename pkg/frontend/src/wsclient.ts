/**
 * Dependency-free WebSocket text client over node:net, used by the
 * headless autoplay driver.  Implements just the client side of RFC 6455:
 * upgrade handshake, masked text frames out, unmasked text frames in.
 */
import { createHash, randomBytes } from "node:crypto";
import { Socket, connect } from "node:net";

const GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";

export interface WsHandlers {
  onOpen?: () => void;
  onMessage?: (text: string) => void;
  onClose?: (reason: string) => void;
}

export class WsTextClient {
  private sock: Socket;
  private buffer = Buffer.alloc(0);
  private upgraded = false;
  private readonly key = randomBytes(16).toString("base64");

  constructor(host: string, port: number, path: string,
              private readonly handlers: WsHandlers) {
    this.sock = connect(port, host, () => {
      this.sock.write(
        `GET ${path} HTTP/1.1\r\nHost: ${host}:${port}\r\n` +
        "Upgrade: websocket\r\nConnection: Upgrade\r\n" +
        `Sec-WebSocket-Key: ${this.key}\r\n` +
        "Sec-WebSocket-Version: 13\r\n\r\n");
    });
    this.sock.on("data", (chunk: Buffer | string) => this.onData(
      Buffer.isBuffer(chunk) ? chunk : Buffer.from(chunk)));
    this.sock.on("error", (err) => handlers.onClose?.(String(err)));
    this.sock.on("close", () => handlers.onClose?.("socket closed"));
  }

  sendText(text: string): void {
    const payload = Buffer.from(text, "utf-8");
    const mask = randomBytes(4);
    const head: number[] = [0x81];
    if (payload.length < 126) head.push(0x80 | payload.length);
    else {
      head.push(0x80 | 126, payload.length >> 8, payload.length & 0xff);
    }
    const masked = Buffer.from(payload);
    for (let i = 0; i < masked.length; i++) masked[i] ^= mask[i % 4];
    this.sock.write(Buffer.concat([Buffer.from(head), mask, masked]));
  }

  close(): void {
    this.sock.destroy();
  }

  private onData(chunk: Buffer): void {
    this.buffer = Buffer.concat([this.buffer, chunk]);
    if (!this.upgraded) {
      const end = this.buffer.indexOf("\r\n\r\n");
      if (end < 0) return;
      const headers = this.buffer.subarray(0, end).toString("latin1");
      this.buffer = this.buffer.subarray(end + 4);
      const expected = createHash("sha1").update(this.key + GUID)
        .digest("base64");
      if (!headers.includes("101") || !headers.includes(expected)) {
        this.handlers.onClose?.("bad upgrade response");
        this.sock.destroy();
        return;
      }
      this.upgraded = true;
      this.handlers.onOpen?.();
    }
    this.drainFrames();
  }

  private drainFrames(): void {
    for (;;) {
      if (this.buffer.length < 2) return;
      const opcode = this.buffer[0] & 0x0f;
      let length = this.buffer[1] & 0x7f;
      let offset = 2;
      if (length === 126) {
        if (this.buffer.length < 4) return;
        length = this.buffer.readUInt16BE(2);
        offset = 4;
      } else if (length === 127) {
        if (this.buffer.length < 10) return;
        length = Number(this.buffer.readBigUInt64BE(2));
        offset = 10;
      }
      if (this.buffer.length < offset + length) return;
      const payload = this.buffer.subarray(offset, offset + length);
      this.buffer = this.buffer.subarray(offset + length);
      if (opcode === 0x8) {
        this.handlers.onClose?.("close frame");
        this.sock.destroy();
        return;
      }
      if (opcode === 0x1) {
        this.handlers.onMessage?.(payload.toString("utf-8"));
      }
    }
  }
}

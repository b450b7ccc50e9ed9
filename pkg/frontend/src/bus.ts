/**
 * WebSocket client for the lab bus. Outbound envelopes queue until the
 * socket opens; inbound messages are decoded and handed to subscribers in
 * arrival order on the UI event loop. A `socketFactory` can stand in for
 * the real WebSocket in tests.
 */

import type { Envelope } from './protocol';
import { decode, encode } from './protocol';

export type BusStatus = 'connecting' | 'open' | 'closed';

export interface BusSocket {
    readyState: number;
    send(data: string): void;
    close(): void;
    onopen: ((ev?: unknown) => void) | null;
    onclose: ((ev?: unknown) => void) | null;
    onmessage: ((ev: { data: unknown }) => void) | null;
}

export interface BusOptions {
    socketFactory?: (url: string) => BusSocket;
}

const OPEN = 1;

export class Bus {
    private sock: BusSocket | null = null;
    private queue: string[] = [];
    private envelopeHandlers: ((env: Envelope) => void)[] = [];
    private statusHandlers: ((status: BusStatus) => void)[] = [];

    constructor(
        private readonly url: string,
        private readonly options: BusOptions = {},
    ) {}

    connect(): void {
        if (this.sock) return;
        const factory = this.options.socketFactory ?? ((u: string) => new WebSocket(u) as BusSocket);
        this.emitStatus('connecting');
        const sock = factory(this.url);
        this.sock = sock;
        sock.onopen = () => {
            const pending = this.queue;
            this.queue = [];
            for (const line of pending) sock.send(line);
            this.emitStatus('open');
        };
        sock.onclose = () => {
            this.sock = null;
            this.emitStatus('closed');
        };
        sock.onmessage = (ev) => {
            if (typeof ev.data !== 'string') return;
            let env: Envelope;
            try {
                env = decode(ev.data);
            } catch {
                return; // a frame we cannot parse is not ours to crash on
            }
            for (const handler of this.envelopeHandlers.slice()) handler(env);
        };
    }

    send(env: Envelope): void {
        const line = encode(env);
        if (this.sock && this.sock.readyState === OPEN) {
            this.sock.send(line);
        } else {
            this.queue.push(line);
            this.connect();
        }
    }

    onEnvelope(handler: (env: Envelope) => void): () => void {
        this.envelopeHandlers.push(handler);
        return () => {
            this.envelopeHandlers = this.envelopeHandlers.filter((h) => h !== handler);
        };
    }

    onStatus(handler: (status: BusStatus) => void): () => void {
        this.statusHandlers.push(handler);
        return () => {
            this.statusHandlers = this.statusHandlers.filter((h) => h !== handler);
        };
    }

    close(): void {
        this.sock?.close();
        this.sock = null;
    }

    private emitStatus(status: BusStatus): void {
        for (const handler of this.statusHandlers.slice()) handler(status);
    }
}

// Local draft persistence so a half-scored round survives a browser restart
// (rounds can span days). Storage is injectable: localStorage in the browser,
// a Map-backed stand-in under test.

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStore implements KeyValueStore {
  private data = new Map<string, string>();

  getItem(key: string): string | null {
    return this.data.has(key) ? this.data.get(key)! : null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }

  removeItem(key: string): void {
    this.data.delete(key);
  }
}

export type DraftScores = Record<number, Record<string, number>>;

export class DraftStore {
  constructor(
    private readonly store: KeyValueStore,
    private readonly sessionId: string,
  ) {}

  private key(round: number): string {
    return `merchcast:${this.sessionId}:round-${round}`;
  }

  load(round: number): DraftScores {
    const raw = this.store.getItem(this.key(round));
    if (!raw) return {};
    try {
      return JSON.parse(raw) as DraftScores;
    } catch {
      return {};
    }
  }

  save(round: number, drafts: DraftScores): void {
    this.store.setItem(this.key(round), JSON.stringify(drafts));
  }

  clear(round: number): void {
    this.store.removeItem(this.key(round));
  }
}

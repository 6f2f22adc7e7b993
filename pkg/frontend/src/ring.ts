// Bounded append-only buffer for time-series points.

export class RingBuffer<T> {
  private items: T[] = [];
  private start = 0;

  constructor(readonly capacity: number) {
    if (capacity < 1) throw new Error("capacity must be >= 1");
  }

  get length(): number {
    return this.items.length - this.start;
  }

  get last(): T | undefined {
    return this.length ? this.items[this.items.length - 1] : undefined;
  }

  push(item: T): void {
    this.items.push(item);
    if (this.length > this.capacity) {
      this.start += 1;
      // keep the backing array from growing without bound
      if (this.start > this.capacity) {
        this.items = this.items.slice(this.start);
        this.start = 0;
      }
    }
  }

  replaceLast(item: T): void {
    if (!this.length) throw new Error("buffer is empty");
    this.items[this.items.length - 1] = item;
  }

  toArray(): T[] {
    return this.items.slice(this.start);
  }
}

/**
 * Park-Miller minimal standard generator, matching the core's scripted
 * action policy stream exactly (48271 * x mod 2^31-1 stays below 2^53, so
 * plain number arithmetic is exact).
 */

const MODULUS = 2147483647;
const MULTIPLIER = 48271;

export class ScriptedActionStream {
  private readonly seed: number;
  private x: number;

  constructor(seed: number) {
    this.seed = seed;
    this.x = 0;
    this.reset();
  }

  reset(): void {
    const x = this.seed % (MODULUS - 1);
    this.x = x === 0 ? 1 : x;
  }

  next(): number {
    this.x = (this.x * MULTIPLIER) % MODULUS;
    return this.x % 3;
  }
}

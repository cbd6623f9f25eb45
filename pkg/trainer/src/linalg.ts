/** Small dense linear algebra: just enough for ridge warm starts and
 * kernel solves (symmetric positive-definite systems via Cholesky). */

export function choleskySolve(a: number[][], b: readonly number[]): number[] {
  const n = a.length;
  // in-place lower-triangular factor of a copy
  const l: number[][] = a.map((row) => row.slice());
  for (let j = 0; j < n; j++) {
    let d = l[j][j];
    for (let k = 0; k < j; k++) d -= l[j][k] * l[j][k];
    if (d <= 0) throw new Error("matrix is not positive definite");
    const dj = Math.sqrt(d);
    l[j][j] = dj;
    for (let i = j + 1; i < n; i++) {
      let s = l[i][j];
      for (let k = 0; k < j; k++) s -= l[i][k] * l[j][k];
      l[i][j] = s / dj;
    }
  }
  // forward then backward substitution
  const y = new Array<number>(n);
  for (let i = 0; i < n; i++) {
    let s = b[i];
    for (let k = 0; k < i; k++) s -= l[i][k] * y[k];
    y[i] = s / l[i][i];
  }
  const x = new Array<number>(n);
  for (let i = n - 1; i >= 0; i--) {
    let s = y[i];
    for (let k = i + 1; k < n; k++) s -= l[k][i] * x[k];
    x[i] = s / l[i][i];
  }
  return x;
}

export function dot(a: readonly number[], b: readonly number[]): number {
  let s = 0;
  for (let i = 0; i < a.length; i++) s += a[i] * b[i];
  return s;
}

export function sqDist(a: readonly number[], b: readonly number[]): number {
  let s = 0;
  for (let i = 0; i < a.length; i++) {
    const d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

export interface Normalizer {
  mean: number[];
  scale: number[];
}

export function fitNormalizer(rows: readonly number[][]): Normalizer {
  const p = rows[0].length;
  const mean = new Array<number>(p).fill(0);
  for (const row of rows) for (let j = 0; j < p; j++) mean[j] += row[j];
  for (let j = 0; j < p; j++) mean[j] /= rows.length;
  const scale = new Array<number>(p).fill(0);
  for (const row of rows) {
    for (let j = 0; j < p; j++) scale[j] += (row[j] - mean[j]) ** 2;
  }
  for (let j = 0; j < p; j++) {
    const sd = Math.sqrt(scale[j] / rows.length);
    scale[j] = sd < 1e-12 ? 1.0 : sd;
  }
  return { mean, scale };
}

export function applyNormalizer(norm: Normalizer,
                                row: readonly number[]): number[] {
  return row.map((v, j) => (v - norm.mean[j]) / norm.scale[j]);
}

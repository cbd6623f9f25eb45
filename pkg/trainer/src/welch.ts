/** One-sided Welch's t-tests over per-split accuracy samples, and the
 * pairwise significance matrix across models. */

import { mean, variance } from "./metrics.js";

/** Regularized incomplete beta I_x(a, b) via the Lentz continued fraction. */
export function regularizedIncompleteBeta(x: number, a: number,
                                          b: number): number {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const lnBeta = lgamma(a) + lgamma(b) - lgamma(a + b);
  const front = Math.exp(a * Math.log(x) + b * Math.log(1 - x) - lnBeta);
  // Use the symmetry relation for faster convergence.
  if (x > (a + 1) / (a + b + 2)) {
    return 1 - regularizedIncompleteBeta(1 - x, b, a);
  }
  const tiny = 1e-300;
  let c = 1;
  let d = 1 - ((a + b) * x) / (a + 1);
  if (Math.abs(d) < tiny) d = tiny;
  d = 1 / d;
  let h = d;
  for (let m = 1; m <= 400; m++) {
    const m2 = 2 * m;
    let num = (m * (b - m) * x) / ((a + m2 - 1) * (a + m2));
    d = 1 + num * d;
    if (Math.abs(d) < tiny) d = tiny;
    c = 1 + num / c;
    if (Math.abs(c) < tiny) c = tiny;
    d = 1 / d;
    h *= d * c;
    num = (-(a + m) * (a + b + m) * x) / ((a + m2) * (a + m2 + 1));
    d = 1 + num * d;
    if (Math.abs(d) < tiny) d = tiny;
    c = 1 + num / c;
    if (Math.abs(c) < tiny) c = tiny;
    d = 1 / d;
    const delta = d * c;
    h *= delta;
    if (Math.abs(delta - 1) < 1e-14) break;
  }
  return (front * h) / a;
}

/** Lanczos log-gamma. */
export function lgamma(z: number): number {
  const g = 7;
  const coef = [
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
  ];
  if (z < 0.5) {
    return Math.log(Math.PI / Math.sin(Math.PI * z)) - lgamma(1 - z);
  }
  z -= 1;
  let x = coef[0];
  for (let i = 1; i < g + 2; i++) x += coef[i] / (z + i);
  const t = z + g + 0.5;
  return 0.5 * Math.log(2 * Math.PI) + (z + 0.5) * Math.log(t) - t +
    Math.log(x);
}

/** P(T <= t) for Student's t with df degrees of freedom. */
export function studentTCdf(t: number, df: number): number {
  const x = df / (df + t * t);
  const tail = 0.5 * regularizedIncompleteBeta(x, df / 2, 0.5);
  return t > 0 ? 1 - tail : tail;
}

export interface WelchResult {
  t: number;
  df: number;
  /** p-value for the one-sided alternative mean(a) > mean(b). */
  pGreater: number;
}

export function welchTTest(a: readonly number[],
                           b: readonly number[]): WelchResult {
  if (a.length < 2 || b.length < 2) {
    throw new Error("need at least 2 samples per side");
  }
  const va = variance(a) / a.length;
  const vb = variance(b) / b.length;
  if (va + vb === 0) {
    return { t: 0, df: a.length + b.length - 2, pGreater: 0.5 };
  }
  const t = (mean(a) - mean(b)) / Math.sqrt(va + vb);
  const df = (va + vb) ** 2 /
    (va ** 2 / (a.length - 1) + vb ** 2 / (b.length - 1));
  return { t, df, pGreater: 1 - studentTCdf(t, df) };
}

export type SignificanceCell = "1" | "0" | "-";

/** Pairwise matrix: "1" when the row model is significantly better than
 * the column model at the given level, "0" when significantly worse. */
export function welchMatrix(samples: ReadonlyMap<string, readonly number[]>,
                            alpha = 0.05): Map<string, SignificanceCell[]> {
  const names = [...samples.keys()];
  const out = new Map<string, SignificanceCell[]>();
  for (const row of names) {
    const cells: SignificanceCell[] = [];
    for (const col of names) {
      if (row === col) {
        cells.push("-");
        continue;
      }
      const better = welchTTest(samples.get(row)!, samples.get(col)!);
      const worse = welchTTest(samples.get(col)!, samples.get(row)!);
      if (better.pGreater < alpha) cells.push("1");
      else if (worse.pGreater < alpha) cells.push("0");
      else cells.push("-");
    }
    out.set(row, cells);
  }
  return out;
}

export function renderWelchCsv(matrix: ReadonlyMap<string, SignificanceCell[]>):
    string {
  const names = [...matrix.keys()];
  const lines = ["model," + names.join(",")];
  for (const row of names) {
    lines.push(row + "," + matrix.get(row)!.join(","));
  }
  return lines.join("\n") + "\n";
}

/** Accuracy metrics: Pearson and Spearman correlation plus RMSE. */

export function mean(xs: readonly number[]): number {
  let s = 0;
  for (const x of xs) s += x;
  return s / xs.length;
}

export function variance(xs: readonly number[], ddof = 1): number {
  const m = mean(xs);
  let s = 0;
  for (const x of xs) s += (x - m) * (x - m);
  return s / (xs.length - ddof);
}

export function pcc(pred: readonly number[], truth: readonly number[]): number {
  checkPair(pred, truth);
  const mp = mean(pred);
  const mt = mean(truth);
  let num = 0;
  let dp = 0;
  let dt = 0;
  for (let i = 0; i < pred.length; i++) {
    const a = pred[i] - mp;
    const b = truth[i] - mt;
    num += a * b;
    dp += a * a;
    dt += b * b;
  }
  if (dp === 0 || dt === 0) {
    throw new Error("correlation undefined for zero-variance inputs");
  }
  return num / Math.sqrt(dp * dt);
}

/** Ranks with ties assigned the average rank of the tied block. */
export function averageRanks(xs: readonly number[]): number[] {
  const order = xs.map((v, i) => [v, i] as const).sort((a, b) => a[0] - b[0]);
  const ranks = new Array<number>(xs.length);
  let i = 0;
  while (i < order.length) {
    let j = i;
    while (j + 1 < order.length && order[j + 1][0] === order[i][0]) j++;
    const avg = (i + j) / 2 + 1;
    for (let k = i; k <= j; k++) ranks[order[k][1]] = avg;
    i = j + 1;
  }
  return ranks;
}

export function srocc(pred: readonly number[], truth: readonly number[]): number {
  checkPair(pred, truth);
  return pcc(averageRanks(pred), averageRanks(truth));
}

export function rmse(pred: readonly number[], truth: readonly number[]): number {
  checkPair(pred, truth);
  let s = 0;
  for (let i = 0; i < pred.length; i++) {
    s += (pred[i] - truth[i]) ** 2;
  }
  return Math.sqrt(s / pred.length);
}

export interface Metrics {
  pcc: number;
  srocc: number;
  rmse: number;
}

export function allMetrics(pred: readonly number[],
                           truth: readonly number[]): Metrics {
  return { pcc: pcc(pred, truth), srocc: srocc(pred, truth),
           rmse: rmse(pred, truth) };
}

export function median(xs: readonly number[]): number {
  const s = xs.slice().sort((a, b) => a - b);
  const n = s.length;
  return n % 2 ? s[(n - 1) / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

function checkPair(pred: readonly number[], truth: readonly number[]): void {
  if (pred.length !== truth.length) {
    throw new Error("prediction and truth lengths differ");
  }
  if (pred.length < 3) {
    throw new Error("need at least 3 samples");
  }
}

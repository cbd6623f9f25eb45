/** The three regressor families, all fit on normalized features and
 * exportable to the runtime's model JSON parameter shapes. */

import { choleskySolve, dot, sqDist } from "./linalg.js";
import { Rng, mulberry32, randInt } from "./rng.js";

export type Family = "linear-svr" | "gaussian-svr" | "random-forest";

export interface FittedModel {
  family: Family;
  predict(xNorm: readonly number[]): number;
  exportParams(): Record<string, unknown>;
}

// ---------------------------------------------------------------------------
// Linear epsilon-insensitive regressor
// ---------------------------------------------------------------------------

export interface LinearConfig {
  c: number;
  epsilonFrac?: number;  // epsilon as a fraction of std(y)
  iterations?: number;
}

/** Ridge-regularized warm start refined by subgradient steps on the
 * epsilon-insensitive loss (0.5 ||w||^2 + C sum L_eps). */
export function fitLinearSvr(x: readonly number[][], y: readonly number[],
                             cfg: LinearConfig): FittedModel {
  const n = x.length;
  const p = x[0].length;
  const yMean = y.reduce((a, b) => a + b, 0) / n;
  const yStd = Math.sqrt(
    y.reduce((a, b) => a + (b - yMean) ** 2, 0) / n) || 1.0;
  const eps = (cfg.epsilonFrac ?? 0.02) * yStd;

  // warm start: (X'X + lambda I) w = X'(y - mean)
  const lambda = 1.0 / (2.0 * cfg.c * n);
  const xtx: number[][] = Array.from({ length: p }, () =>
    new Array<number>(p).fill(0));
  const xty = new Array<number>(p).fill(0);
  for (let i = 0; i < n; i++) {
    const yc = y[i] - yMean;
    for (let j = 0; j < p; j++) {
      xty[j] += x[i][j] * yc;
      for (let k = j; k < p; k++) xtx[j][k] += x[i][j] * x[i][k];
    }
  }
  for (let j = 0; j < p; j++) {
    for (let k = 0; k < j; k++) xtx[j][k] = xtx[k][j];
    xtx[j][j] += n * lambda + 1e-12;
  }
  let w = choleskySolve(xtx, xty);
  let b = yMean;

  const iters = cfg.iterations ?? 300;
  const lr0 = 0.5 / (cfg.c * n + 1);
  let bestW = w.slice();
  let bestB = b;
  let bestLoss = Infinity;
  for (let t = 0; t < iters; t++) {
    const gw = w.map((v) => v / (cfg.c * n));
    let gb = 0;
    let loss = dot(w, w) / (2 * cfg.c * n);
    for (let i = 0; i < n; i++) {
      const r = y[i] - (dot(w, x[i]) + b);
      const excess = Math.abs(r) - eps;
      if (excess > 0) {
        loss += excess / n;
        const s = Math.sign(r) / n;
        for (let j = 0; j < p; j++) gw[j] -= s * x[i][j];
        gb -= s;
      }
    }
    if (loss < bestLoss) {
      bestLoss = loss;
      bestW = w.slice();
      bestB = b;
    }
    const lr = lr0 / (1 + t / 50);
    for (let j = 0; j < p; j++) w[j] -= lr * cfg.c * n * gw[j];
    b -= lr * cfg.c * n * gb;
  }
  w = bestW;
  b = bestB;

  return {
    family: "linear-svr",
    predict: (xn) => dot(w, xn) + b,
    exportParams: () => ({ weights: w.slice(), bias: b }),
  };
}

// ---------------------------------------------------------------------------
// Gaussian-kernel regressor (kernel expansion fit in closed form)
// ---------------------------------------------------------------------------

export interface GaussianConfig {
  c: number;
  gamma: number;
}

export function fitGaussianSvr(x: readonly number[][], y: readonly number[],
                               cfg: GaussianConfig): FittedModel {
  const n = x.length;
  const yMean = y.reduce((a, b) => a + b, 0) / n;
  const lambda = 1.0 / cfg.c;
  const k: number[][] = Array.from({ length: n }, () =>
    new Array<number>(n).fill(0));
  for (let i = 0; i < n; i++) {
    k[i][i] = 1 + lambda;
    for (let j = i + 1; j < n; j++) {
      const v = Math.exp(-cfg.gamma * sqDist(x[i], x[j]));
      k[i][j] = v;
      k[j][i] = v;
    }
  }
  const alphas = choleskySolve(k, y.map((v) => v - yMean));
  const sv = x.map((row) => row.slice());
  return {
    family: "gaussian-svr",
    predict: (xn) => {
      let s = yMean;
      for (let i = 0; i < n; i++) {
        s += alphas[i] * Math.exp(-cfg.gamma * sqDist(sv[i], xn));
      }
      return s;
    },
    exportParams: () => ({
      support_vectors: sv,
      dual_coefs: alphas.slice(),
      gamma: cfg.gamma,
      bias: yMean,
    }),
  };
}

// ---------------------------------------------------------------------------
// Random forest
// ---------------------------------------------------------------------------

export interface ForestConfig {
  trees: number;
  maxDepth: number | null;
  seed: number;
  mtryFrac?: number;
  minSamplesSplit?: number;
}

type TreeNode =
  | { feature: number; threshold: number; left: number; right: number }
  | { value: number };

function fitTree(x: readonly number[][], y: readonly number[],
                 indices: number[], cfg: Required<ForestConfig>,
                 rng: Rng): TreeNode[] {
  const p = x[0].length;
  const mtry = Math.max(1, Math.floor(p * cfg.mtryFrac));
  const maxDepth = cfg.maxDepth ?? 64;
  const nodes: TreeNode[] = [];

  const grow = (idx: number[], depth: number): number => {
    const node = nodes.length;
    nodes.push({ value: 0 });
    const m = idx.reduce((a, i) => a + y[i], 0) / idx.length;
    let sse = 0;
    for (const i of idx) sse += (y[i] - m) ** 2;
    if (depth >= maxDepth || idx.length < cfg.minSamplesSplit || sse <= 1e-24) {
      nodes[node] = { value: m };
      return node;
    }
    // feature subsample without replacement
    const feats: number[] = [];
    const pool = Array.from({ length: p }, (_, j) => j);
    for (let k = 0; k < mtry; k++) {
      const pick = k + randInt(rng, p - k);
      [pool[k], pool[pick]] = [pool[pick], pool[k]];
      feats.push(pool[k]);
    }
    let best: { feature: number; threshold: number; score: number } | null =
      null;
    for (const f of feats) {
      const order = idx.slice().sort((a, b) => x[a][f] - x[b][f]);
      let leftSum = 0;
      let leftSq = 0;
      let rightSum = 0;
      let rightSq = 0;
      for (const i of order) {
        rightSum += y[i];
        rightSq += y[i] * y[i];
      }
      for (let s = 0; s < order.length - 1; s++) {
        const i = order[s];
        leftSum += y[i];
        leftSq += y[i] * y[i];
        rightSum -= y[i];
        rightSq -= y[i] * y[i];
        if (x[order[s]][f] === x[order[s + 1]][f]) continue;
        const nl = s + 1;
        const nr = order.length - nl;
        const score = (leftSq - (leftSum * leftSum) / nl) +
          (rightSq - (rightSum * rightSum) / nr);
        if (!best || score < best.score) {
          best = {
            feature: f,
            threshold: 0.5 * (x[order[s]][f] + x[order[s + 1]][f]),
            score,
          };
        }
      }
    }
    if (!best || best.score >= sse) {
      nodes[node] = { value: m };
      return node;
    }
    const leftIdx = idx.filter((i) => x[i][best!.feature] <= best!.threshold);
    const rightIdx = idx.filter((i) => x[i][best!.feature] > best!.threshold);
    if (leftIdx.length === 0 || rightIdx.length === 0) {
      nodes[node] = { value: m };
      return node;
    }
    const left = grow(leftIdx, depth + 1);
    const right = grow(rightIdx, depth + 1);
    nodes[node] = { feature: best.feature, threshold: best.threshold,
                    left, right };
    return node;
  };

  grow(indices, 0);
  return nodes;
}

function treePredict(nodes: TreeNode[], xn: readonly number[]): number {
  let node = nodes[0];
  while (!("value" in node)) {
    node = xn[node.feature] <= node.threshold
      ? nodes[node.left] : nodes[node.right];
  }
  return node.value;
}

export function fitRandomForest(x: readonly number[][],
                                y: readonly number[],
                                cfg: ForestConfig): FittedModel {
  const full: Required<ForestConfig> = {
    mtryFrac: 1 / 3, minSamplesSplit: 2, ...cfg,
    maxDepth: cfg.maxDepth,
  } as Required<ForestConfig>;
  const rng = mulberry32(cfg.seed);
  const n = x.length;
  const trees: TreeNode[][] = [];
  for (let t = 0; t < cfg.trees; t++) {
    const bootstrap = Array.from({ length: n }, () => randInt(rng, n));
    trees.push(fitTree(x, y, bootstrap, full, rng));
  }
  return {
    family: "random-forest",
    predict: (xn) => {
      let s = 0;
      for (const nodes of trees) s += treePredict(nodes, xn);
      return s / trees.length;
    },
    exportParams: () => ({ trees: trees.map((nodes) => ({ nodes })) }),
  };
}

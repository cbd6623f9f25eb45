/** Inner cross-validated hyper-parameter search per family and the
 * best-family selection used for each outer split. */

import { LabeledDataset } from "./dataset.js";
import { Normalizer, applyNormalizer, fitNormalizer } from "./linalg.js";
import { srocc } from "./metrics.js";
import { FittedModel, Family, fitGaussianSvr, fitLinearSvr,
         fitRandomForest } from "./regressors.js";
import { Rng, deriveSeed, mulberry32, shuffled } from "./rng.js";

export interface TuneConfig {
  innerFolds: number;
  linearC: number[];
  gaussianC: number[];
  gaussianGammaScale: number[];  // multiplied by 1/p
  forestTrees: number[];
  forestDepth: (number | null)[];
}

export const DEFAULT_TUNE: TuneConfig = {
  innerFolds: 5,
  linearC: [0.01, 0.1, 1, 10, 100],
  gaussianC: [1, 10, 100],
  gaussianGammaScale: [0.3, 1, 3],
  forestTrees: [100, 300],
  forestDepth: [8, 16, null],
};

export interface SelectedModel {
  family: Family;
  model: FittedModel;
  normalizer: Normalizer;
  innerScores: Record<Family, number>;
  hyperParams: Record<string, unknown>;
}

interface Candidate {
  family: Family;
  hyperParams: Record<string, unknown>;
  fit(x: number[][], y: number[], seed: number): FittedModel;
}

function candidates(cfg: TuneConfig, p: number): Candidate[] {
  const out: Candidate[] = [];
  for (const c of cfg.linearC) {
    out.push({
      family: "linear-svr", hyperParams: { c },
      fit: (x, y) => fitLinearSvr(x, y, { c }),
    });
  }
  for (const c of cfg.gaussianC) {
    for (const gs of cfg.gaussianGammaScale) {
      const gamma = gs / p;
      out.push({
        family: "gaussian-svr", hyperParams: { c, gamma },
        fit: (x, y) => fitGaussianSvr(x, y, { c, gamma }),
      });
    }
  }
  for (const trees of cfg.forestTrees) {
    for (const maxDepth of cfg.forestDepth) {
      out.push({
        family: "random-forest", hyperParams: { trees, maxDepth },
        fit: (x, y, seed) => fitRandomForest(x, y, { trees, maxDepth, seed }),
      });
    }
  }
  return out;
}

/** Content-separated fold assignment over a subset of rows. */
export function contentFolds(dataset: LabeledDataset, rows: number[],
                             k: number, rng: Rng): number[][] {
  const contents = [...new Set(rows.map((i) => dataset.contentIds[i]))];
  const order = shuffled(contents, rng);
  const assignment = new Map<string, number>();
  order.forEach((c, i) => assignment.set(c, i % k));
  const folds: number[][] = Array.from({ length: k }, () => []);
  for (const i of rows) {
    folds[assignment.get(dataset.contentIds[i])!].push(i);
  }
  return folds.filter((f) => f.length > 0);
}

function scoreCandidate(cand: Candidate, dataset: LabeledDataset,
                        folds: number[][], rows: number[],
                        seed: number): number {
  let total = 0;
  let counted = 0;
  for (let f = 0; f < folds.length; f++) {
    const holdSet = new Set(folds[f]);
    const trainIdx = rows.filter((i) => !holdSet.has(i));
    const testIdx = folds[f];
    if (trainIdx.length < 3 || testIdx.length < 3) continue;
    const norm = fitNormalizer(trainIdx.map((i) => dataset.features[i]));
    const xTrain = trainIdx.map((i) =>
      applyNormalizer(norm, dataset.features[i]));
    const yTrain = trainIdx.map((i) => dataset.labels[i]);
    const model = cand.fit(xTrain, yTrain, deriveSeed(seed, f));
    const preds = testIdx.map((i) =>
      model.predict(applyNormalizer(norm, dataset.features[i])));
    const truth = testIdx.map((i) => dataset.labels[i]);
    try {
      total += srocc(preds, truth);
      counted += 1;
    } catch {
      total += -1.0;  // degenerate predictions score as failures
      counted += 1;
    }
  }
  return counted ? total / counted : -Infinity;
}

/** Tune every family on the training rows, pick the best candidate per
 * family, then the best family by inner-CV rank correlation; refit the
 * winner (and per-family winners) on the full training set. */
export function trainAndSelect(dataset: LabeledDataset, trainRows: number[],
                               cfg: TuneConfig, seed: number):
    { selected: SelectedModel; perFamily: Map<Family, SelectedModel> } {
  const yTrain = trainRows.map((i) => dataset.labels[i]);
  const spread = Math.max(...yTrain) - Math.min(...yTrain);
  if (!(spread > 0)) {
    throw new Error("degenerate labels: training targets are constant");
  }
  const p = dataset.features[0].length;
  const rng = mulberry32(deriveSeed(seed, 0xf01d));
  const folds = contentFolds(dataset, trainRows, cfg.innerFolds, rng);

  const bestPerFamily = new Map<Family, { cand: Candidate; score: number }>();
  candidates(cfg, p).forEach((cand, ci) => {
    const score = scoreCandidate(cand, dataset, folds, trainRows,
                                 deriveSeed(seed, ci + 1));
    const cur = bestPerFamily.get(cand.family);
    if (!cur || score > cur.score) {
      bestPerFamily.set(cand.family, { cand, score });
    }
  });

  const norm = fitNormalizer(trainRows.map((i) => dataset.features[i]));
  const xTrain = trainRows.map((i) =>
    applyNormalizer(norm, dataset.features[i]));
  const innerScores = {} as Record<Family, number>;
  const perFamily = new Map<Family, SelectedModel>();
  let best: SelectedModel | null = null;
  for (const [family, { cand, score }] of bestPerFamily) {
    innerScores[family] = score;
    const fitted: SelectedModel = {
      family,
      model: cand.fit(xTrain, yTrain, deriveSeed(seed, 0xbeef)),
      normalizer: norm,
      innerScores,
      hyperParams: cand.hyperParams,
    };
    perFamily.set(family, fitted);
    if (!best || score > innerScores[best.family]) best = fitted;
  }
  return { selected: best!, perFamily };
}

export function predictRows(selected: SelectedModel, dataset: LabeledDataset,
                            rows: number[]): number[] {
  return rows.map((i) => selected.model.predict(
    applyNormalizer(selected.normalizer, dataset.features[i])));
}

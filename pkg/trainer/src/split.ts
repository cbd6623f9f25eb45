/** Content-separated random splits: the same source content never appears
 * on both sides of a split. */

import { LabeledDataset } from "./dataset.js";
import { Rng, deriveSeed, mulberry32, shuffled } from "./rng.js";

export interface Split {
  train: number[];
  test: number[];
}

export function contentSplit(dataset: LabeledDataset, rng: Rng,
                             trainFrac = 0.8): Split {
  const contents = [...new Set(dataset.contentIds)];
  if (contents.length < 2) {
    throw new Error("need at least 2 distinct contents to split");
  }
  const order = shuffled(contents, rng);
  const nTrain = Math.max(1, Math.min(contents.length - 1,
                                      Math.round(contents.length * trainFrac)));
  const trainContents = new Set(order.slice(0, nTrain));
  const train: number[] = [];
  const test: number[] = [];
  dataset.contentIds.forEach((c, i) => {
    (trainContents.has(c) ? train : test).push(i);
  });
  return { train, test };
}

export function makeSplits(dataset: LabeledDataset, seed: number,
                           nSplits = 100, trainFrac = 0.8): Split[] {
  const splits: Split[] = [];
  for (let s = 0; s < nSplits; s++) {
    const rng = mulberry32(deriveSeed(seed, s));
    splits.push(contentSplit(dataset, rng, trainFrac));
  }
  return splits;
}

export function assertContentSeparated(dataset: LabeledDataset,
                                       split: Split): void {
  const trainContents = new Set(split.train.map((i) => dataset.contentIds[i]));
  for (const i of split.test) {
    if (trainContents.has(dataset.contentIds[i])) {
      throw new Error(
        `content ${dataset.contentIds[i]} appears on both split sides`);
    }
  }
}

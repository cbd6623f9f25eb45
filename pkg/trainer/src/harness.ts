/** The evaluation protocol: repeated content-separated splits, per-family
 * tuning and testing, significance analysis, and the final model export. */

import { LabeledDataset } from "./dataset.js";
import { Metrics, allMetrics, median } from "./metrics.js";
import { Family } from "./regressors.js";
import { Split, assertContentSeparated, makeSplits } from "./split.js";
import { DEFAULT_TUNE, SelectedModel, TuneConfig, predictRows,
         trainAndSelect } from "./tune.js";
import { SignificanceCell, welchMatrix } from "./welch.js";

export interface ProtocolOptions {
  seed: number;
  nSplits: number;
  trainFrac: number;
  tune: TuneConfig;
}

export const DEFAULT_OPTIONS: ProtocolOptions = {
  seed: 42,
  nSplits: 100,
  trainFrac: 0.8,
  tune: DEFAULT_TUNE,
};

export interface SplitOutcome {
  split: number;
  selectedFamily: Family;
  hyperParams: Record<string, unknown>;
  metrics: Metrics;
  perFamily: Record<string, Metrics>;
}

export interface ProtocolReport {
  options: { seed: number; nSplits: number; trainFrac: number };
  splits: SplitOutcome[];
  medians: Metrics;
  perFamilyMedians: Record<string, Metrics>;
  familySelectionCounts: Record<string, number>;
  significance: Record<string, SignificanceCell[]>;
  significanceOrder: string[];
}

export function runProtocol(dataset: LabeledDataset,
                            options: ProtocolOptions = DEFAULT_OPTIONS):
    { report: ProtocolReport; finalModel: SelectedModel } {
  const splits = makeSplits(dataset, options.seed, options.nSplits,
                            options.trainFrac);
  const outcomes: SplitOutcome[] = [];
  const sroccSamples = new Map<string, number[]>();
  const counts: Record<string, number> = {};

  splits.forEach((split: Split, s: number) => {
    assertContentSeparated(dataset, split);
    const { selected, perFamily } = trainAndSelect(
      dataset, split.train, options.tune, options.seed + 7919 * s);
    const truth = split.test.map((i) => dataset.labels[i]);
    const perFamilyMetrics: Record<string, Metrics> = {};
    for (const [family, model] of perFamily) {
      const m = allMetrics(predictRows(model, dataset, split.test), truth);
      perFamilyMetrics[family] = m;
      if (!sroccSamples.has(family)) sroccSamples.set(family, []);
      sroccSamples.get(family)!.push(m.srocc);
    }
    const headline = perFamilyMetrics[selected.family];
    counts[selected.family] = (counts[selected.family] ?? 0) + 1;
    outcomes.push({
      split: s,
      selectedFamily: selected.family,
      hyperParams: selected.hyperParams,
      metrics: headline,
      perFamily: perFamilyMetrics,
    });
  });

  const medians: Metrics = {
    pcc: median(outcomes.map((o) => o.metrics.pcc)),
    srocc: median(outcomes.map((o) => o.metrics.srocc)),
    rmse: median(outcomes.map((o) => o.metrics.rmse)),
  };
  const perFamilyMedians: Record<string, Metrics> = {};
  for (const family of sroccSamples.keys()) {
    perFamilyMedians[family] = {
      pcc: median(outcomes.map((o) => o.perFamily[family].pcc)),
      srocc: median(outcomes.map((o) => o.perFamily[family].srocc)),
      rmse: median(outcomes.map((o) => o.perFamily[family].rmse)),
    };
  }
  const significance = welchMatrix(sroccSamples);

  // Final deliverable model: tuned and fit on the full dataset.
  const allRows = dataset.labels.map((_, i) => i);
  const { selected: finalModel } = trainAndSelect(
    dataset, allRows, options.tune, options.seed);

  const report: ProtocolReport = {
    options: { seed: options.seed, nSplits: options.nSplits,
               trainFrac: options.trainFrac },
    splits: outcomes,
    medians,
    perFamilyMedians,
    familySelectionCounts: counts,
    significance: Object.fromEntries(significance),
    significanceOrder: [...significance.keys()],
  };
  return { report, finalModel };
}

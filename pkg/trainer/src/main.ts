/** CLI: run the evaluation protocol over extracted features and export the
 * trained model, the split report, and the significance matrix.
 *
 *   node dist/main.js run --features-dir DIR --labels labels.csv \
 *       --out-dir OUT [--splits 100] [--seed 42] [--train-frac 0.8]
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { loadDataset } from "./dataset.js";
import { writeModel } from "./export.js";
import { DEFAULT_OPTIONS, runProtocol } from "./harness.js";
import { renderWelchCsv } from "./welch.js";

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    if (argv[i].startsWith("--")) {
      out.set(argv[i].slice(2), argv[i + 1] ?? "");
      i++;
    }
  }
  return out;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== "run") {
    console.error("usage: main.js run --features-dir D --labels L " +
                  "--out-dir O [--splits N] [--seed S] [--train-frac F]");
    return 2;
  }
  const args = parseArgs(rest);
  const featuresDir = args.get("features-dir");
  const labels = args.get("labels");
  const outDir = args.get("out-dir");
  if (!featuresDir || !labels || !outDir) {
    console.error("missing required flags");
    return 2;
  }
  const options = {
    ...DEFAULT_OPTIONS,
    seed: Number(args.get("seed") ?? DEFAULT_OPTIONS.seed),
    nSplits: Number(args.get("splits") ?? DEFAULT_OPTIONS.nSplits),
    trainFrac: Number(args.get("train-frac") ?? DEFAULT_OPTIONS.trainFrac),
  };

  const dataset = loadDataset(featuresDir, labels);
  console.log(`dataset: ${dataset.labels.length} videos, ` +
              `${new Set(dataset.contentIds).size} contents, ` +
              `${dataset.featureNames.length} features`);
  const { report, finalModel } = runProtocol(dataset, options);

  mkdirSync(outDir, { recursive: true });
  writeFileSync(join(outDir, "split_report.json"),
                JSON.stringify(report, null, 2));
  const sig = new Map(report.significanceOrder.map(
    (k) => [k, report.significance[k]]));
  writeFileSync(join(outDir, "significance_matrix.csv"), renderWelchCsv(sig));
  writeModel(join(outDir, "model.json"), finalModel, dataset.manifestHash);

  console.log(`median PCC ${report.medians.pcc.toFixed(4)} ` +
              `SROCC ${report.medians.srocc.toFixed(4)} ` +
              `RMSE ${report.medians.rmse.toFixed(4)}`);
  console.log(`final model: ${finalModel.family} ` +
              JSON.stringify(finalModel.hyperParams));
  return 0;
}

const invokedDirectly = process.argv[1]?.endsWith("main.js");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}

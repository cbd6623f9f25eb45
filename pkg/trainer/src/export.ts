/** Model export in the runtime's JSON format. */

import { writeFileSync } from "node:fs";

import { SelectedModel } from "./tune.js";

export function modelPayload(selected: SelectedModel,
                             manifestHash: string): Record<string, unknown> {
  return {
    model_type: selected.family,
    manifest_hash: manifestHash,
    normalization: {
      mean: selected.normalizer.mean,
      scale: selected.normalizer.scale,
    },
    params: selected.model.exportParams(),
  };
}

export function writeModel(path: string, selected: SelectedModel,
                           manifestHash: string): void {
  writeFileSync(path, JSON.stringify(modelPayload(selected, manifestHash)));
}

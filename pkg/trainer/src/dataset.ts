/** Labeled dataset assembly: per-video feature vectors (the runtime's
 * feature CSV format) joined with a labels CSV of
 * (video_id, content_id, mos). */

import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";

export interface LabeledDataset {
  manifestHash: string;
  featureNames: string[];
  /** row-major feature matrix, one row per video */
  features: number[][];
  labels: number[];
  videoIds: string[];
  contentIds: string[];
}

export interface FeatureCsv {
  manifestHash: string;
  names: string[];
  perFrame: (number | null)[][];
  perVideo: (number | null)[];
}

export function parseFeatureCsv(text: string): FeatureCsv {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (!lines[0]?.startsWith("# manifest_hash=")) {
    throw new Error("not a feature CSV: missing manifest hash line");
  }
  const manifestHash = lines[0].slice("# manifest_hash=".length);
  const names = lines[1].split(",").slice(1);
  const perFrame: (number | null)[][] = [];
  let perVideo: (number | null)[] | null = null;
  for (const line of lines.slice(2)) {
    const cells = line.split(",");
    const row = cells.slice(1).map((c) => (c === "" ? null : Number(c)));
    if (cells[0] === "video") perVideo = row;
    else perFrame.push(row);
  }
  if (!perVideo) throw new Error("feature CSV has no per-video row");
  return { manifestHash, names, perFrame, perVideo };
}

export function readFeatureCsv(path: string): FeatureCsv {
  return parseFeatureCsv(readFileSync(path, "utf-8"));
}

export interface LabelRow {
  videoId: string;
  contentId: string;
  mos: number;
}

export function parseLabelsCsv(text: string): LabelRow[] {
  const lines = text.split("\n").map((l) => l.trim()).filter(Boolean);
  const header = lines[0].split(",").map((h) => h.trim());
  const idx = {
    videoId: header.indexOf("video_id"),
    contentId: header.indexOf("content_id"),
    mos: header.indexOf("mos"),
  };
  if (idx.videoId < 0 || idx.contentId < 0 || idx.mos < 0) {
    throw new Error("labels CSV needs video_id, content_id, mos columns");
  }
  return lines.slice(1).map((line) => {
    const cells = line.split(",");
    return {
      videoId: cells[idx.videoId].trim(),
      contentId: cells[idx.contentId].trim(),
      mos: Number(cells[idx.mos]),
    };
  });
}

/** Join <featuresDir>/<video_id>.csv per-video rows with the labels. */
export function loadDataset(featuresDir: string,
                            labelsPath: string): LabeledDataset {
  const labels = parseLabelsCsv(readFileSync(labelsPath, "utf-8"));
  const available = new Set(readdirSync(featuresDir));
  let manifestHash = "";
  let featureNames: string[] = [];
  const rows: number[][] = [];
  const mos: number[] = [];
  const videoIds: string[] = [];
  const contentIds: string[] = [];
  for (const row of labels) {
    const file = `${row.videoId}.csv`;
    if (!available.has(file)) {
      throw new Error(`missing feature CSV for video ${row.videoId}`);
    }
    const csv = readFeatureCsv(join(featuresDir, file));
    if (!manifestHash) {
      manifestHash = csv.manifestHash;
      featureNames = csv.names;
    } else if (csv.manifestHash !== manifestHash) {
      throw new Error(`manifest hash mismatch in ${file}`);
    }
    if (csv.perVideo.some((v) => v === null || !Number.isFinite(v))) {
      throw new Error(`non-finite per-video features in ${file}`);
    }
    rows.push(csv.perVideo as number[]);
    mos.push(row.mos);
    videoIds.push(row.videoId);
    contentIds.push(row.contentId);
  }
  if (rows.length === 0) throw new Error("empty dataset");
  return { manifestHash, featureNames, features: rows, labels: mos,
           videoIds, contentIds };
}

export function datasetFromArrays(features: number[][], labels: number[],
                                  contentIds: string[],
                                  manifestHash = "sha256:synthetic",
                                  featureNames?: string[]): LabeledDataset {
  return {
    manifestHash,
    featureNames: featureNames ??
      features[0].map((_, i) => `f${i}`),
    features,
    labels,
    videoIds: features.map((_, i) => `v${i}`),
    contentIds,
  };
}

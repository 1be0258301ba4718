/**
 * Sentence-encoder backends. The supported model names are accepted
 * verbatim and resolved to their ONNX community ports; any other value
 * containing a "/" is treated as a raw hub repo path.
 */

export type Encoder = (texts: string[]) => Promise<number[][]>;

export class UnknownModel extends Error {}

interface KnownModel {
  repo: string;
  dim: number;
}

export const KNOWN_MODELS: Record<string, KnownModel> = {
  "distiluse-base-multilingual-cased-v2": {
    repo: "Xenova/distiluse-base-multilingual-cased-v2",
    dim: 512,
  },
  "paraphrase-multilingual-MiniLM-L12-v2": {
    repo: "Xenova/paraphrase-multilingual-MiniLM-L12-v2",
    dim: 384,
  },
  "paraphrase-multilingual-mpnet-base-v2": {
    repo: "Xenova/paraphrase-multilingual-mpnet-base-v2",
    dim: 768,
  },
};

export function resolveModel(modelId: string): { repo: string; dim: number | null } {
  const known = KNOWN_MODELS[modelId];
  if (known) {
    return { repo: known.repo, dim: known.dim };
  }
  if (modelId.includes("/")) {
    return { repo: modelId, dim: null };
  }
  throw new UnknownModel(
    `unknown model "${modelId}"; expected one of ${Object.keys(KNOWN_MODELS).join(", ")} ` +
      `or a hub repo path like "org/name"`,
  );
}

/**
 * Mean-pooled feature extraction. Normalization is left to the consumer,
 * which normalizes rows itself before computing cosine neighborhoods.
 */
export async function loadEncoder(modelId: string): Promise<Encoder> {
  const { repo } = resolveModel(modelId);
  const { pipeline } = await import("@huggingface/transformers");
  const extractor = await pipeline("feature-extraction", repo);
  return async (texts: string[]) => {
    const output = await extractor(texts, { pooling: "mean", normalize: false });
    return output.tolist() as number[][];
  };
}

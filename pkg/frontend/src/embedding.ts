/**
 * Feedforward code-embedding network over dense path vectors.
 *
 * Four hidden layers (ReLU, dropout, L2 kernel regularization), a softmax
 * output over method-name classes, and the Adam optimizer.  The last hidden
 * layer is fixed at 50 units; its activations are the code embedding.
 */

import * as tf from '@tensorflow/tfjs';

export const EMBEDDING_DIM = 50;
export const HIDDEN_LAYER_COUNT = 4;

export interface EmbeddingNetConfig {
  inputDim: number;
  classCount: number;
  hiddenSizes?: [number, number, number, number];
  dropoutRate?: number;
  l2?: number;
  learningRate?: number;
  epochs?: number;
  batchSize?: number;
  seed?: number;
}

export interface EmbeddingNet {
  /** classifier: dense path vector -> class probabilities */
  model: tf.LayersModel;
  /** same layers, truncated at the 50-unit hidden layer */
  embeddingModel: tf.LayersModel;
  hiddenSizes: [number, number, number, number];
}

export interface TrainedEmbedding extends EmbeddingNet {
  classes: string[];
  /** per-sample 50-d embeddings, aligned with the training inputs */
  embeddings: number[][];
  /** per-sample class probabilities */
  probabilities: number[][];
  trainAccuracy: number;
  epochs: number;
}

/** Geometric taper from the input width down to the 50-unit embedding layer. */
export function defaultHiddenSizes(inputDim: number): [number, number, number, number] {
  const sizes: number[] = [];
  for (let layer = 1; layer <= 3; layer++) {
    const size = Math.round(
      Math.exp(Math.log(Math.max(inputDim, EMBEDDING_DIM)) * (1 - layer / 4) +
               Math.log(EMBEDDING_DIM) * (layer / 4)),
    );
    sizes.push(Math.max(EMBEDDING_DIM, size));
  }
  return [sizes[0], sizes[1], sizes[2], EMBEDDING_DIM];
}

export function buildEmbeddingNet(config: EmbeddingNetConfig): EmbeddingNet {
  const hiddenSizes = config.hiddenSizes ?? defaultHiddenSizes(config.inputDim);
  if (hiddenSizes.length !== HIDDEN_LAYER_COUNT) {
    throw new Error(`expected ${HIDDEN_LAYER_COUNT} hidden layers, got ${hiddenSizes.length}`);
  }
  if (hiddenSizes[HIDDEN_LAYER_COUNT - 1] !== EMBEDDING_DIM) {
    throw new Error(`last hidden layer must have ${EMBEDDING_DIM} units`);
  }
  const dropoutRate = config.dropoutRate ?? 0.2;
  const l2 = config.l2 ?? 1e-4;
  const seed = config.seed ?? 42;

  const input = tf.input({ shape: [config.inputDim] });
  let x = input as tf.SymbolicTensor;
  let embeddingOutput: tf.SymbolicTensor | null = null;
  hiddenSizes.forEach((units, i) => {
    x = tf.layers
      .dense({
        units,
        activation: 'relu',
        kernelRegularizer: tf.regularizers.l2({ l2 }),
        kernelInitializer: tf.initializers.glorotUniform({ seed: seed + i }),
        name: `hidden_${i + 1}`,
      })
      .apply(x) as tf.SymbolicTensor;
    if (i === HIDDEN_LAYER_COUNT - 1) {
      embeddingOutput = x; // 50-unit activations, before the final dropout
    }
    x = tf.layers
      .dropout({ rate: dropoutRate, seed: seed + 100 + i })
      .apply(x) as tf.SymbolicTensor;
  });
  const output = tf.layers
    .dense({
      units: config.classCount,
      activation: 'softmax',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 7 }),
      name: 'class_probs',
    })
    .apply(x) as tf.SymbolicTensor;

  const model = tf.model({ inputs: input, outputs: output });
  model.compile({
    optimizer: tf.train.adam(config.learningRate ?? 1e-3),
    loss: 'categoricalCrossentropy',
    metrics: ['accuracy'],
  });
  const embeddingModel = tf.model({ inputs: input, outputs: embeddingOutput! });
  return { model, embeddingModel, hiddenSizes };
}

export function classIndex(labels: string[]): { classes: string[]; indices: number[] } {
  const classes = [...new Set(labels)].sort();
  const byLabel = new Map(classes.map((label, i) => [label, i]));
  return { classes, indices: labels.map((label) => byLabel.get(label)!) };
}

export async function trainEmbedding(
  vectors: number[][],
  labels: string[],
  config: Partial<EmbeddingNetConfig> = {},
): Promise<TrainedEmbedding> {
  if (vectors.length === 0 || vectors.length !== labels.length) {
    throw new Error(`need equally many vectors and labels, got ${vectors.length}/${labels.length}`);
  }
  const inputDim = vectors[0].length;
  if (vectors.some((v) => v.length !== inputDim)) {
    throw new Error(`all vectors must have dimension ${inputDim}`);
  }
  const { classes, indices } = classIndex(labels);
  const net = buildEmbeddingNet({
    ...config,
    inputDim,
    classCount: classes.length,
  });
  const epochs = config.epochs ?? 60;
  const xs = tf.tensor2d(vectors);
  const ys = tf.oneHot(tf.tensor1d(indices, 'int32'), classes.length);
  try {
    await net.model.fit(xs, ys, {
      epochs,
      batchSize: config.batchSize ?? 32,
      shuffle: true,
      verbose: 0,
    });
    const probsTensor = net.model.predict(xs) as tf.Tensor2D;
    const embedTensor = net.embeddingModel.predict(xs) as tf.Tensor2D;
    const probabilities = (await probsTensor.array()) as number[][];
    const embeddings = (await embedTensor.array()) as number[][];
    probsTensor.dispose();
    embedTensor.dispose();
    let correct = 0;
    probabilities.forEach((row, i) => {
      const argmax = row.indexOf(Math.max(...row));
      if (argmax === indices[i]) correct++;
    });
    return {
      ...net,
      classes,
      embeddings,
      probabilities,
      trainAccuracy: correct / vectors.length,
      epochs,
    };
  } finally {
    xs.dispose();
    ys.dispose();
  }
}

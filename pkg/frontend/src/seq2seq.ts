/**
 * Desk-scale LSTM encoder-decoder for the exported src/tgt token files.
 *
 * A small teacher-forced sequence model with beam-search decoding; it
 * validates that exported datasets are learnable end to end, and reports
 * top-1/top-5 exact-match accuracy over candidate target sequences.
 */

import * as tf from '@tensorflow/tfjs';

import { EOS, PAD, ParallelData, SOS, Vocab, buildVocab } from './data.js';

export interface Seq2SeqConfig {
  hiddenSize?: number;
  embeddingDim?: number;
  epochs?: number;
  batchSize?: number;
  learningRate?: number;
  dropout?: number;
  maxSrcLen?: number;
  maxTgtLen?: number;
  seed?: number;
}

export interface Candidate {
  tokens: string[];
  logProb: number;
}

export interface EvalResult {
  top1: number;
  top5: number;
  samples: number;
}

export class Seq2Seq {
  constructor(
    readonly encoder: tf.LayersModel,
    readonly decoderStep: tf.LayersModel,
    readonly srcVocab: Vocab,
    readonly tgtVocab: Vocab,
    readonly maxSrcLen: number,
    readonly maxTgtLen: number,
  ) {}

  /** Beam-search decode; returns up to `width` candidates, best first. */
  decode(srcTokens: string[], width = 5): Candidate[] {
    return tf.tidy(() => {
      const encoded = this.srcVocab.encode(srcTokens, this.maxSrcLen);
      const [h0, c0] = this.encoder.predict(
        tf.tensor2d([encoded], [1, this.maxSrcLen], 'int32'),
      ) as tf.Tensor2D[];

      interface Beam {
        ids: number[];
        logProb: number;
        h: tf.Tensor2D;
        c: tf.Tensor2D;
        done: boolean;
      }
      const eosId = this.tgtVocab.id(EOS);
      const padId = this.tgtVocab.id(PAD);
      let beams: Beam[] = [
        { ids: [this.tgtVocab.id(SOS)], logProb: 0, h: h0, c: c0, done: false },
      ];
      for (let step = 0; step < this.maxTgtLen; step++) {
        if (beams.every((b) => b.done)) break;
        const expanded: Beam[] = [];
        for (const beam of beams) {
          if (beam.done) {
            expanded.push(beam);
            continue;
          }
          const lastId = beam.ids[beam.ids.length - 1];
          const [probs, h1, c1] = this.decoderStep.predict([
            tf.tensor2d([[lastId]], [1, 1], 'int32'),
            beam.h,
            beam.c,
          ]) as [tf.Tensor3D, tf.Tensor2D, tf.Tensor2D];
          const row = probs.reshape([this.tgtVocab.size]).arraySync() as number[];
          const ranked = row
            .map((p, id) => ({ id, p }))
            .filter(({ id }) => id !== padId)
            .sort((a, b) => b.p - a.p)
            .slice(0, width);
          for (const { id, p } of ranked) {
            expanded.push({
              ids: [...beam.ids, id],
              logProb: beam.logProb + Math.log(Math.max(p, 1e-12)),
              h: h1,
              c: c1,
              done: id === eosId,
            });
          }
        }
        expanded.sort((a, b) => b.logProb - a.logProb);
        beams = expanded.slice(0, width);
      }
      return beams
        .sort((a, b) => b.logProb - a.logProb)
        .map((beam) => ({
          tokens: beam.ids
            .slice(1)
            .filter((id) => id !== eosId && id !== padId)
            .map((id) => this.tgtVocab.token(id)),
          logProb: beam.logProb,
        }));
    });
  }

  /** Exact-match accuracy of the best candidate (top-1) and of any candidate (top-5). */
  evaluate(data: ParallelData, width = 5): EvalResult {
    if (data.src.length === 0) {
      throw new Error('evaluation set is empty');
    }
    let top1 = 0;
    let top5 = 0;
    for (let i = 0; i < data.src.length; i++) {
      const expected = data.tgt[i].join(' ');
      const candidates = this.decode(data.src[i], width).map((c) => c.tokens.join(' '));
      if (candidates[0] === expected) top1++;
      if (candidates.slice(0, width).includes(expected)) top5++;
    }
    return { top1: top1 / data.src.length, top5: top5 / data.src.length, samples: data.src.length };
  }
}

function _shuffled(data: ParallelData, seed: number): ParallelData {
  let state = seed >>> 0;
  const rand = () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 2 ** 32;
  };
  const order = data.src.map((_, i) => i);
  for (let i = order.length - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [order[i], order[j]] = [order[j], order[i]];
  }
  return {
    src: order.map((i) => data.src[i]),
    tgt: order.map((i) => data.tgt[i]),
  };
}

export async function trainSeq2Seq(
  data: ParallelData,
  config: Seq2SeqConfig = {},
): Promise<Seq2Seq> {
  if (data.src.length === 0) throw new Error('training set is empty');
  data = _shuffled(data, (config.seed ?? 7) + 1);
  const hidden = config.hiddenSize ?? 64;
  const embedDim = config.embeddingDim ?? 32;
  const seed = config.seed ?? 7;
  const maxSrcLen = config.maxSrcLen ?? Math.max(...data.src.map((s) => s.length)) + 1;
  const maxTgtLen = config.maxTgtLen ?? Math.max(...data.tgt.map((t) => t.length)) + 1;
  const srcVocab = buildVocab(data.src);
  const tgtVocab = buildVocab(data.tgt);

  // shared layers
  const srcEmbedding = tf.layers.embedding({
    inputDim: srcVocab.size,
    outputDim: embedDim,
    embeddingsInitializer: tf.initializers.randomUniform({ minval: -0.05, maxval: 0.05, seed }),
    name: 'src_embedding',
  });
  const encoderLstm = tf.layers.lstm({
    units: hidden,
    returnState: true,
    dropout: config.dropout ?? 0,  // tfjs RNN dropout masks are unseeded; 0 keeps runs reproducible
    kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
    recurrentInitializer: tf.initializers.orthogonal({ seed: seed + 11 }),
    name: 'encoder_lstm',
  });
  const tgtEmbedding = tf.layers.embedding({
    inputDim: tgtVocab.size,
    outputDim: embedDim,
    embeddingsInitializer: tf.initializers.randomUniform({ minval: -0.05, maxval: 0.05, seed: seed + 2 }),
    name: 'tgt_embedding',
  });
  const decoderLstm = tf.layers.lstm({
    units: hidden,
    returnSequences: true,
    returnState: true,
    dropout: config.dropout ?? 0,
    kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 3 }),
    recurrentInitializer: tf.initializers.orthogonal({ seed: seed + 13 }),
    name: 'decoder_lstm',
  });
  const outputDense = tf.layers.dense({
    units: tgtVocab.size,
    activation: 'softmax',
    kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 4 }),
    name: 'tgt_probs',
  });

  // training graph (teacher forcing)
  const encInput = tf.input({ shape: [maxSrcLen], dtype: 'int32' });
  const decInput = tf.input({ shape: [maxTgtLen], dtype: 'int32' });
  const encOutputs = encoderLstm.apply(srcEmbedding.apply(encInput)) as tf.SymbolicTensor[];
  const encStates = [encOutputs[1], encOutputs[2]];
  const decOutputs = decoderLstm.apply(tgtEmbedding.apply(decInput), {
    initialState: encStates,
  }) as tf.SymbolicTensor[];
  const probs = outputDense.apply(decOutputs[0]) as tf.SymbolicTensor;
  const trainer = tf.model({ inputs: [encInput, decInput], outputs: probs });
  trainer.compile({
    optimizer: tf.train.adam(config.learningRate ?? 5e-3),
    loss: 'categoricalCrossentropy',
  });

  const encData = tf.tensor2d(
    data.src.map((s) => srcVocab.encode(s, maxSrcLen)),
    [data.src.length, maxSrcLen],
    'int32',
  );
  const decData = tf.tensor2d(
    data.tgt.map((t) => tgtVocab.encode(t, maxTgtLen, { sos: true })),
    [data.tgt.length, maxTgtLen],
    'int32',
  );
  const targetIds = data.tgt.map((t) => tgtVocab.encode(t, maxTgtLen, { eos: true }));
  const targets = tf.oneHot(tf.tensor2d(targetIds, [data.tgt.length, maxTgtLen], 'int32'), tgtVocab.size);

  try {
    // shuffle:false keeps fit() off Math.random, so a fixed seed reproduces
    // metrics exactly; the sample order was already randomized by _shuffled.
    await trainer.fit([encData, decData], targets, {
      epochs: config.epochs ?? 40,
      batchSize: config.batchSize ?? 32,
      shuffle: false,
      verbose: 0,
    });
  } finally {
    encData.dispose();
    decData.dispose();
    targets.dispose();
  }

  // inference graphs
  const encoder = tf.model({ inputs: encInput, outputs: encStates });
  const stepInput = tf.input({ shape: [1], dtype: 'int32' });
  const stepH = tf.input({ shape: [hidden] });
  const stepC = tf.input({ shape: [hidden] });
  const stepOutputs = decoderLstm.apply(tgtEmbedding.apply(stepInput), {
    initialState: [stepH, stepC],
  }) as tf.SymbolicTensor[];
  const stepProbs = outputDense.apply(stepOutputs[0]) as tf.SymbolicTensor;
  const decoderStep = tf.model({
    inputs: [stepInput, stepH, stepC],
    outputs: [stepProbs, stepOutputs[1], stepOutputs[2]],
  });

  return new Seq2Seq(encoder, decoderStep, srcVocab, tgtVocab, maxSrcLen, maxTgtLen);
}

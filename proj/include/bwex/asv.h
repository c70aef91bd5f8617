// include/bwex/asv.h

// Copyright 2026  bwex authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef BWEX_ASV_H_
#define BWEX_ASV_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bwex/losses.h"
#include "bwex/nn.h"
#include "bwex/train.h"
#include "bwex/wave.h"

namespace bwex {

// Speaker-verification backend: log-mel features, energy-based voice
// activity detection, a residual convolutional speaker encoder trained with
// additive-angular-margin classification, LDA projection, and
// two-covariance PLDA scoring.

// ---------------------------------------------------------------------------
// Log-mel features

struct LogMelConfig {
  int64_t sample_rate = 16000;
  int64_t frame_length = 400;  // 25 ms
  int64_t hop = 160;           // 10 ms
  int64_t fft_size = 512;
  int64_t num_bands = 80;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
  double energy_floor = 1e-10;  // mel energies are clamped here before log
};

// Row-major frames x bands.
struct FeatureMatrix {
  int64_t num_frames = 0;
  int64_t num_bands = 0;
  std::vector<double> v;
  double& At(int64_t f, int64_t b) {
    return v[static_cast<size_t>(f * num_bands + b)];
  }
  double At(int64_t f, int64_t b) const {
    return v[static_cast<size_t>(f * num_bands + b)];
  }
};

double MelFromHz(double hz);
double HzFromMel(double mel);
// Center frequency of triangular band j on the config's mel grid.
double MelBandCenterHz(int64_t band, const LogMelConfig& c = LogMelConfig());

// Natural-log mel filterbank energies over 25 ms / 10 ms frames (no frame
// extends past the signal).  Input must be at the configured rate and at
// least one frame long.
FeatureMatrix LogMel(const Waveform& w, const LogMelConfig& c = LogMelConfig());

// Differentiable path used inside feature-space losses: x is (B, 1, T),
// result is (B, num_bands, frames).  Same arithmetic as LogMel.
ag::Tensor LogMelTensor(const ag::Tensor& x,
                        const LogMelConfig& c = LogMelConfig());

// ---------------------------------------------------------------------------
// Voice activity detection

// A frame is speech iff its log total mel energy exceeds the utterance mean
// by more than tau (log units) and sits above the all-floor energy, so an
// all-zero signal yields no speech frames.  The threshold is relative, which
// makes the mask invariant to global gain.
std::vector<uint8_t> EnergyVad(const FeatureMatrix& f, double tau = -3.0,
                               const LogMelConfig& c = LogMelConfig());

// Keeps the rows whose mask entry is nonzero.
FeatureMatrix SelectFrames(const FeatureMatrix& f,
                           const std::vector<uint8_t>& mask);

// ---------------------------------------------------------------------------
// Speaker encoder

struct EncoderConfig {
  LogMelConfig logmel;
  std::vector<int64_t> channels = {32, 32, 64, 64, 128};  // one per block
  int64_t kernel = 3;
  int64_t d_emb = 64;
};

struct EncoderOutput {
  ag::Tensor embedding;                 // (B, d_emb)
  std::vector<ag::Tensor> activations;  // one per residual block
};

// Residual convolutional encoder over log-mel features with temporal
// statistics pooling (mean and standard deviation), producing fixed-size
// embeddings for inputs of any length.  Copies share parameters.
class SpeakerEncoder {
 public:
  SpeakerEncoder() = default;
  SpeakerEncoder(const std::string& name, const EncoderConfig& cfg, Rng* rng);

  // features: (B, num_bands, frames), frames >= 1.
  EncoderOutput Forward(const ag::Tensor& features) const;
  std::vector<nn::Parameter> Params() const;
  const EncoderConfig& Config() const { return cfg_; }

 private:
  struct Block {
    nn::Conv1dLayer c1, c2, proj;
    nn::ChannelLayerNormLayer n1, n2;
    bool has_proj = false;
  };
  EncoderConfig cfg_;
  nn::Conv1dLayer stem_;
  nn::ChannelLayerNormLayer stem_norm_;
  std::vector<Block> blocks_;
  nn::LinearLayer emb_;
};

// Additive-angular-margin softmax head over normalized embeddings and class
// weights: the target class logit uses cos(theta + margin), all logits are
// multiplied by `scale`.
class AamHead {
 public:
  AamHead() = default;
  AamHead(const std::string& name, int64_t d_emb, int64_t num_classes,
          double margin, double scale, Rng* rng);

  // Scaled cosine logits without the margin; argmax is the prediction.
  ag::Tensor Logits(const ag::Tensor& emb) const;
  // Mean margin cross entropy over the batch.
  ag::Tensor Loss(const ag::Tensor& emb,
                  const std::vector<int64_t>& labels) const;
  double Accuracy(const ag::Tensor& emb,
                  const std::vector<int64_t>& labels) const;
  std::vector<nn::Parameter> Params() const;
  double Margin() const { return margin_; }
  double Scale() const { return scale_; }

 private:
  int64_t d_emb_ = 0, num_classes_ = 0;
  double margin_ = 0.3, scale_ = 30.0;
  nn::Parameter w_;  // (num_classes, d_emb)
};

struct EncoderTrainConfig {
  int64_t steps = 500;
  int64_t batch_size = 8;
  double lr = 1e-3;
  int64_t num_speakers = 0;  // must be >= 2
};

// Batch of voice-filtered feature chunks as a pure function of the step
// index: (B, num_bands, frames) plus one class label per row.
using ChunkStream =
    std::function<std::pair<ag::Tensor, std::vector<int64_t>>(int64_t step)>;

// Joint Adam training of encoder and head; one record per step with `loss`
// and `accuracy` values.
std::vector<HistoryRecord> TrainSpeakerEncoder(const EncoderTrainConfig& cfg,
                                               SpeakerEncoder* enc,
                                               AamHead* head,
                                               const ChunkStream& stream,
                                               std::ostream* log = nullptr);

// ---------------------------------------------------------------------------
// Embeddings

struct Embedding {
  std::vector<double> vector;
  std::string id;
  std::string speaker_id;                        // optional label
  std::map<std::string, std::string> condition;  // optional tags
};

double CosineSimilarity(const std::vector<double>& a,
                        const std::vector<double>& b);

// Deterministic utterance embedding: log-mel, energy VAD (falling back to
// all frames when nothing passes), encoder forward, statistics pooling.
Embedding ExtractEmbedding(const SpeakerEncoder& enc, const Waveform& w,
                           double vad_tau = -3.0);

// Activation provider over raw waveforms (B, 1, T): log-mel followed by the
// encoder blocks, differentiable end to end.  The captured encoder shares
// parameters with `enc`.
ActivationFn MakeDeepFeatureProvider(const SpeakerEncoder& enc);

// Delimited table, one row per embedding:
//   id <TAB> speaker <TAB> k=v,... (or "-") <TAB> v1,v2,...
void WriteEmbeddings(const std::string& path,
                     const std::vector<Embedding>& rows);
std::vector<Embedding> ReadEmbeddings(const std::string& path);

// ---------------------------------------------------------------------------
// LDA + two-covariance PLDA

struct PldaModel {
  Array mean;         // (d_emb): global embedding mean
  Array lda;          // (d_lda, d_emb): projection rows
  Array proj_mean;    // (d_lda): mean after projection and length norm
  Array within_cov;   // (d_lda, d_lda), symmetric PSD
  Array between_cov;  // (d_lda, d_lda), symmetric PSD
};

// LDA from the class-scatter generalized eigenproblem, then closed-form
// between/within covariance estimates on projected, length-normalized
// embeddings.  Requires >= 2 speakers with >= 2 utterances each.  When the
// between-class scatter cannot support d_lda directions the dimension is
// reduced and a note is appended to `warnings`.
PldaModel TrainLdaPlda(const std::vector<Embedding>& rows, int64_t d_lda,
                       std::vector<std::string>* warnings = nullptr);

// Log-likelihood ratio of same-speaker vs different-speaker hypotheses.
// Precomputes the simultaneous diagonalization of the two covariances so
// scoring is a per-dimension closed form; safe to share across threads.
class PldaScorer {
 public:
  explicit PldaScorer(const PldaModel& m);
  double Score(const Embedding& enroll, const Embedding& test) const;

 private:
  std::vector<double> Preprocess(const Embedding& e) const;
  PldaModel model_;
  std::vector<double> diag_;  // V^T, row-major (d_lda x d_lda)
  std::vector<double> psi_;   // between-cov eigenvalues, within whitened
};

double PldaScore(const PldaModel& m, const Embedding& enroll,
                 const Embedding& test);

void SavePldaModel(const std::string& path, const PldaModel& m);
PldaModel LoadPldaModel(const std::string& path);

}  // namespace bwex

#endif  // BWEX_ASV_H_

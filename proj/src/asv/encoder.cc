// src/asv/encoder.cc

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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "bwex/asv.h"
#include "bwex/common.h"

namespace bwex {

namespace {

using ag::Tensor;

// (R, C) rows scaled to unit length; the epsilon keeps the gradient finite
// at the origin.
Tensor RowNormalize(const Tensor& t) {
  const Tensor ss = ag::ReduceSum(ag::Square(t), {false, true});
  return ag::Div(t, ag::Sqrt(ag::ClampMin(ss, 1e-24)));
}

Tensor ClampUnitInterval(const Tensor& t) {
  const double hi = 1.0 - 1e-7;
  return ag::Neg(ag::ClampMin(ag::Neg(ag::ClampMin(t, -hi)), -hi));
}

double ParseStrict(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == nullptr || *end != '\0' || end == s.c_str())
    throw InvalidArgument(StrCat("malformed number in embedding table: ", s));
  return v;
}

}  // namespace

SpeakerEncoder::SpeakerEncoder(const std::string& name,
                               const EncoderConfig& cfg, Rng* rng)
    : cfg_(cfg) {
  if (cfg.channels.empty() || cfg.d_emb < 1 || cfg.kernel < 1 ||
      cfg.kernel % 2 == 0)
    throw InvalidArgument("encoder needs blocks, an odd kernel, d_emb >= 1");
  const int64_t pad = (cfg.kernel - 1) / 2;
  ag::ConvGeom same;
  same.pad_left = pad;
  same.pad_right = pad;
  ag::ConvGeom stem_geom;
  stem_geom.pad_left = 2;
  stem_geom.pad_right = 2;

  stem_ = nn::Conv1dLayer(name + ".stem", cfg.logmel.num_bands,
                          cfg.channels[0], 5, stem_geom, true, rng);
  stem_norm_ = nn::ChannelLayerNormLayer(name + ".stem_norm",
                                         cfg.channels[0]);
  int64_t in_ch = cfg.channels[0];
  for (size_t i = 0; i < cfg.channels.size(); ++i) {
    const int64_t out_ch = cfg.channels[i];
    const std::string base = name + ".block" + std::to_string(i);
    Block b;
    b.c1 = nn::Conv1dLayer(base + ".c1", in_ch, out_ch, cfg.kernel, same,
                           true, rng);
    b.n1 = nn::ChannelLayerNormLayer(base + ".n1", out_ch);
    b.c2 = nn::Conv1dLayer(base + ".c2", out_ch, out_ch, cfg.kernel, same,
                           true, rng);
    b.n2 = nn::ChannelLayerNormLayer(base + ".n2", out_ch);
    b.has_proj = (in_ch != out_ch);
    if (b.has_proj)
      b.proj = nn::Conv1dLayer(base + ".proj", in_ch, out_ch, 1,
                               ag::ConvGeom(), false, rng);
    blocks_.push_back(std::move(b));
    in_ch = out_ch;
  }
  emb_ = nn::LinearLayer(name + ".emb", 2 * in_ch, cfg.d_emb, true, rng);
}

EncoderOutput SpeakerEncoder::Forward(const Tensor& features) const {
  if (features.Value().Rank() != 3 ||
      features.Dims()[1] != cfg_.logmel.num_bands || features.Dims()[2] < 1)
    throw InvalidArgument(StrCat("encoder expects (B, ", cfg_.logmel.num_bands,
                          ", frames)"));
  EncoderOutput out;
  Tensor h = ag::Relu(stem_norm_.Forward(stem_.Forward(features)));
  for (const Block& b : blocks_) {
    const Tensor skip = b.has_proj ? b.proj.Forward(h) : h;
    Tensor y = ag::Relu(b.n1.Forward(b.c1.Forward(h)));
    y = b.n2.Forward(b.c2.Forward(y));
    h = ag::Relu(ag::Add(y, skip));
    out.activations.push_back(h);
  }
  // Statistics pooling: per-channel mean and standard deviation over time
  // make the embedding length-invariant.
  const Tensor mean = ag::ReduceMean(h, {false, false, true});
  const Tensor var =
      ag::ReduceMean(ag::Square(ag::Sub(h, mean)), {false, false, true});
  const Tensor sd = ag::Sqrt(ag::AddScalar(var, 1e-10));
  const Tensor stats = ag::ConcatChannels(mean, sd);
  const int64_t b = features.Dims()[0];
  out.embedding =
      emb_.Forward(ag::Reshape(stats, {b, stats.Dims()[1]}));
  return out;
}

std::vector<nn::Parameter> SpeakerEncoder::Params() const {
  std::vector<nn::Parameter> p;
  stem_.CollectParams(&p);
  stem_norm_.CollectParams(&p);
  for (const Block& b : blocks_) {
    b.c1.CollectParams(&p);
    b.n1.CollectParams(&p);
    b.c2.CollectParams(&p);
    b.n2.CollectParams(&p);
    if (b.has_proj) b.proj.CollectParams(&p);
  }
  emb_.CollectParams(&p);
  return p;
}

AamHead::AamHead(const std::string& name, int64_t d_emb, int64_t num_classes,
                 double margin, double scale, Rng* rng)
    : d_emb_(d_emb),
      num_classes_(num_classes),
      margin_(margin),
      scale_(scale) {
  if (d_emb < 1 || num_classes < 2)
    throw InvalidArgument("head needs d_emb >= 1 and >= 2 classes");
  if (margin < 0.0 || margin >= M_PI / 2 || scale <= 0.0)
    throw InvalidArgument("margin must lie in [0, pi/2), scale > 0");
  Array w({num_classes, d_emb});
  nn::InitUniformFanIn(&w, d_emb, rng);
  w_ = {name + ".w", Tensor(std::move(w), true)};
}

Tensor AamHead::Logits(const Tensor& emb) const {
  if (emb.Value().Rank() != 2 || emb.Dims()[1] != d_emb_)
    throw InvalidArgument(StrCat("head expects (B, ", d_emb_, ") embeddings"));
  const int64_t b = emb.Dims()[0];
  const Tensor e = ag::Reshape(RowNormalize(emb), {b, d_emb_, 1});
  const Tensor w =
      ag::Reshape(RowNormalize(w_.t), {num_classes_, d_emb_, 1});
  const Tensor cos = ag::Reshape(ag::Conv1d(e, w, ag::ConvGeom()),
                                 {b, num_classes_});
  return ag::MulScalar(ClampUnitInterval(cos), scale_);
}

Tensor AamHead::Loss(const Tensor& emb,
                     const std::vector<int64_t>& labels) const {
  if (emb.Value().Rank() != 2 || emb.Dims()[1] != d_emb_)
    throw InvalidArgument(StrCat("head expects (B, ", d_emb_, ") embeddings"));
  const int64_t b = emb.Dims()[0];
  if (static_cast<int64_t>(labels.size()) != b)
    throw InvalidArgument("one label per row required");
  Array onehot_a({b, num_classes_});
  for (int64_t i = 0; i < b; ++i) {
    const int64_t y = labels[static_cast<size_t>(i)];
    if (y < 0 || y >= num_classes_)
      throw InvalidArgument(StrCat("label out of range: ", y));
    onehot_a.v[static_cast<size_t>(i * num_classes_ + y)] = 1.0;
  }
  const Tensor onehot = ag::Constant(std::move(onehot_a));

  const Tensor e = ag::Reshape(RowNormalize(emb), {b, d_emb_, 1});
  const Tensor w =
      ag::Reshape(RowNormalize(w_.t), {num_classes_, d_emb_, 1});
  const Tensor cos = ClampUnitInterval(ag::Reshape(
      ag::Conv1d(e, w, ag::ConvGeom()), {b, num_classes_}));

  // cos(theta + m) = cos*cos(m) - sin*sin(m), applied to the target class.
  const Tensor sin = ag::Sqrt(ag::ClampMin(
      ag::AddScalar(ag::Neg(ag::Mul(cos, cos)), 1.0), 1e-14));
  const Tensor phi = ag::Sub(ag::MulScalar(cos, std::cos(margin_)),
                             ag::MulScalar(sin, std::sin(margin_)));
  const Tensor logits = ag::MulScalar(
      ag::Add(cos, ag::Mul(onehot, ag::Sub(phi, cos))), scale_);

  // |logits| <= scale, so the plain log-sum-exp is overflow-safe.
  const Tensor logsum =
      ag::Log(ag::ReduceSum(ag::Exp(logits), {false, true}));
  const Tensor target = ag::ReduceSum(ag::Mul(logits, onehot), {false, true});
  return ag::MeanAll(ag::Sub(logsum, target));
}

double AamHead::Accuracy(const Tensor& emb,
                         const std::vector<int64_t>& labels) const {
  ag::NoGradGuard ng;
  const Tensor logits = Logits(emb);
  const Array& v = logits.Value();
  const int64_t b = v.dims[0];
  if (static_cast<int64_t>(labels.size()) != b)
    throw InvalidArgument("one label per row required");
  int64_t hits = 0;
  for (int64_t i = 0; i < b; ++i) {
    int64_t best = 0;
    for (int64_t j = 1; j < num_classes_; ++j)
      if (v.v[static_cast<size_t>(i * num_classes_ + j)] >
          v.v[static_cast<size_t>(i * num_classes_ + best)])
        best = j;
    if (best == labels[static_cast<size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(b);
}

std::vector<nn::Parameter> AamHead::Params() const { return {w_}; }

std::vector<HistoryRecord> TrainSpeakerEncoder(const EncoderTrainConfig& cfg,
                                               SpeakerEncoder* enc,
                                               AamHead* head,
                                               const ChunkStream& stream,
                                               std::ostream* log) {
  if (cfg.num_speakers < 2)
    throw InvalidArgument("at least two speakers required");
  if (cfg.steps < 1 || cfg.batch_size < 1 || cfg.lr <= 0.0)
    throw InvalidArgument("steps and batch must be positive, lr > 0");
  if (enc == nullptr || head == nullptr || !stream)
    throw InvalidArgument("encoder, head, and chunk stream required");

  std::vector<nn::Parameter> params = enc->Params();
  for (const nn::Parameter& p : head->Params()) params.push_back(p);
  nn::Adam opt(params, cfg.lr);

  const LogMelConfig& mel = enc->Config().logmel;
  std::vector<HistoryRecord> history;
  double audio_seconds = 0.0;
  for (int64_t s = 0; s < cfg.steps; ++s) {
    auto batch = stream(s);
    const Tensor& x = batch.first;
    const std::vector<int64_t>& labels = batch.second;
    if (x.Value().Rank() != 3)
      throw InvalidArgument("chunk stream must yield (B, bands, frames)");
    const EncoderOutput out = enc->Forward(x);
    const Tensor loss = head->Loss(out.embedding, labels);
    const double lv = loss.Value().v[0];
    if (!std::isfinite(lv)) throw RuntimeError("encoder training diverged");
    const double acc = head->Accuracy(out.embedding, labels);

    opt.ZeroGrad();
    ag::Backward(loss);
    opt.Step();

    audio_seconds += static_cast<double>(x.Dims()[0]) *
                     static_cast<double>((x.Dims()[2] - 1) * mel.hop +
                                         mel.frame_length) /
                     static_cast<double>(mel.sample_rate);
    HistoryRecord rec;
    rec.epoch = 0;
    rec.step = s + 1;
    rec.audio_seconds = audio_seconds;
    rec.lr_g = cfg.lr;
    rec.lr_d = 0.0;
    rec.values["loss"] = lv;
    rec.values["accuracy"] = acc;
    if (log != nullptr) *log << HistoryLine(rec) << "\n";
    history.push_back(std::move(rec));
  }
  return history;
}

double CosineSimilarity(const std::vector<double>& a,
                        const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty())
    throw InvalidArgument("vectors must share a nonzero dimension");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double den = std::sqrt(na) * std::sqrt(nb);
  return den > 0.0 ? dot / den : 0.0;
}

Embedding ExtractEmbedding(const SpeakerEncoder& enc, const Waveform& w,
                           double vad_tau) {
  const LogMelConfig& mel = enc.Config().logmel;
  const FeatureMatrix full = LogMel(w, mel);
  FeatureMatrix f = SelectFrames(full, EnergyVad(full, vad_tau, mel));
  if (f.num_frames == 0) f = full;  // an all-quiet utterance keeps all frames

  ag::NoGradGuard ng;
  Array in({1, f.num_bands, f.num_frames});
  for (int64_t b = 0; b < f.num_bands; ++b)
    for (int64_t t = 0; t < f.num_frames; ++t) in.At(0, b, t) = f.At(t, b);
  const EncoderOutput out = enc.Forward(ag::Tensor(std::move(in)));

  Embedding e;
  const Array& v = out.embedding.Value();
  e.vector.assign(v.v.begin(), v.v.end());
  return e;
}

ActivationFn MakeDeepFeatureProvider(const SpeakerEncoder& enc) {
  const SpeakerEncoder copy = enc;  // layers share parameter nodes
  return [copy](const Tensor& x) {
    return copy.Forward(LogMelTensor(x, copy.Config().logmel)).activations;
  };
}

void WriteEmbeddings(const std::string& path,
                     const std::vector<Embedding>& rows) {
  std::ofstream out(path);
  if (!out) throw RuntimeError(StrCat("cannot write ", path));
  char buf[64];
  for (const Embedding& e : rows) {
    if (e.vector.empty()) throw InvalidArgument("empty embedding vector");
    out << (e.id.empty() ? "-" : e.id) << '\t'
        << (e.speaker_id.empty() ? "-" : e.speaker_id) << '\t';
    if (e.condition.empty()) {
      out << '-';
    } else {
      bool first = true;
      for (const auto& kv : e.condition) {
        if (!first) out << ',';
        out << kv.first << '=' << kv.second;
        first = false;
      }
    }
    out << '\t';
    for (size_t i = 0; i < e.vector.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", e.vector[i]);
      if (i > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

std::vector<Embedding> ReadEmbeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError(StrCat("cannot read ", path));
  std::vector<Embedding> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id, speaker, tags, vec;
    if (!std::getline(ls, id, '\t') || !std::getline(ls, speaker, '\t') ||
        !std::getline(ls, tags, '\t') || !std::getline(ls, vec))
      throw InvalidArgument("embedding row needs 4 tab-separated fields");
    Embedding e;
    e.id = (id == "-") ? "" : id;
    e.speaker_id = (speaker == "-") ? "" : speaker;
    if (tags != "-") {
      std::istringstream ts(tags);
      std::string item;
      while (std::getline(ts, item, ',')) {
        const size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
          throw InvalidArgument(StrCat("condition tag must be key=value: ", item));
        e.condition[item.substr(0, eq)] = item.substr(eq + 1);
      }
    }
    std::istringstream vs(vec);
    std::string num;
    while (std::getline(vs, num, ',')) e.vector.push_back(ParseStrict(num));
    if (e.vector.empty())
      throw InvalidArgument("embedding row has no vector values");
    rows.push_back(std::move(e));
  }
  return rows;
}

}  // namespace bwex

#include "nucseg/losses.hpp"

#include <cmath>

#include "nucseg/morphology.hpp"

namespace nucseg {
namespace {

void require_same(const Volume& a, const Volume& b, const char* what) {
  if (!(a.shape() == b.shape()) || a.channels() != b.channels()) throw Error(ErrorCode::kShapeMismatch, what);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

LossResult ssd_loss(const Volume& pred, const Volume& target, const std::optional<Volume>& mask) {
  require_same(pred, target, "ssd_loss: pred and target differ");
  LossResult r{0.0, Volume(pred.shape(), pred.channels(), pred.voxel_size())};
  if (mask) {
    if (!(mask->shape() == pred.shape()) || mask->channels() != 1) {
      throw Error(ErrorCode::kShapeMismatch, "ssd_loss: mask must be single-channel with the prediction's shape");
    }
    for (Index c = 0; c < pred.channels(); ++c) {
      const auto diff = (pred.channel(c) - target.channel(c)) * mask->channel(0);
      r.gradient.channel(c) = 2.0 * diff;
      r.value += (diff * diff).sum();
    }
  } else {
    const auto diff = pred.data() - target.data();
    r.gradient.data() = 2.0 * diff;
    r.value = diff.square().sum();
  }
  return r;
}

LossResult softmax_ce_loss(const Volume& logits, const Volume& target) {
  if (logits.channels() != 3) throw Error(ErrorCode::kWrongChannelCount, "softmax_ce_loss expects 3 logit channels");
  if (!(target.shape() == logits.shape()) || target.channels() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "softmax_ce_loss: target must be one class channel of the logits' shape");
  }
  LossResult r{0.0, Volume(logits.shape(), 3, logits.voxel_size())};
  for (Index v = 0; v < logits.voxels(); ++v) {
    const double t = target.at(0, v);
    if (!is_three_label_class(t)) {
      throw Error(ErrorCode::kInvalidClass, "class value must be 0, 1 or 2");
    }
    const int cls = static_cast<int>(t);
    const double m = std::max({logits.at(0, v), logits.at(1, v), logits.at(2, v)});
    double e[3];
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) sum += (e[c] = std::exp(logits.at(c, v) - m));
    const double log_sum = std::log(sum);
    r.value += log_sum - (logits.at(cls, v) - m);
    for (int c = 0; c < 3; ++c) r.gradient.at(c, v) = e[c] / sum - (c == cls ? 1.0 : 0.0);
  }
  return r;
}

LossResult sigmoid_bce_loss(const Volume& logits, const Volume& target) {
  require_same(logits, target, "sigmoid_bce_loss: logits and target differ");
  if (!((target.data() == 0.0) || (target.data() == 1.0)).all()) {
    throw Error(ErrorCode::kInvalidArgument, "sigmoid_bce_loss: targets must be 0 or 1");
  }
  LossResult r{0.0, Volume(logits.shape(), logits.channels(), logits.voxel_size())};
  for (Index i = 0; i < logits.size(); ++i) {
    const double x = logits.data()[i];
    const double t = target.data()[i];
    // -t log s(x) - (1-t) log(1 - s(x)) = softplus(x) - t x
    r.value += softplus(x) - t * x;
    r.gradient.data()[i] = sigmoid(x) - t;
  }
  return r;
}

LossResult combined_loss(const std::function<LossResult()>& main, const Volume& cpv_pred, const Volume& cpv_target,
                         const Volume& fg_mask, double main_weight) {
  if (!(main_weight > 0.0)) throw Error(ErrorCode::kInvalidArgument, "main_weight must be > 0");
  if (cpv_pred.channels() != kCpvChannels) throw Error(ErrorCode::kWrongChannelCount, "cpv prediction needs 3 channels");
  const LossResult m = main();
  if (!(m.gradient.shape() == cpv_pred.shape())) throw Error(ErrorCode::kShapeMismatch, "main and cpv shapes differ");
  const LossResult aux = ssd_loss(cpv_pred, cpv_target, fg_mask);
  Volume scaled = m.gradient;
  scaled.data() *= main_weight;
  return {main_weight * m.value + aux.value, concat_channels(scaled, aux.gradient)};
}

double main_loss_weight(Variant variant) { return variant == Variant::kSdt ? 100.0 : 1.0; }

LossResult main_loss(Variant variant, const Volume& pred, const Volume& target) {
  switch (variant) {
    case Variant::kSdt:
    case Variant::kGauss: return ssd_loss(pred, target);
    case Variant::kThreeLabel: return softmax_ce_loss(pred, target);
    case Variant::kAffinities: return sigmoid_bce_loss(pred, target);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown variant");
}

LossResult bundle_loss(Variant variant, const Volume& pred, const Volume& bundle, const LabelVolume& labels) {
  const Index pred_main = prediction_channels(variant);
  const Index target_main = target_channels(variant);
  const bool with_cpv = bundle.channels() == target_main + kCpvChannels;
  if (!with_cpv && bundle.channels() != target_main) {
    throw Error(ErrorCode::kWrongChannelCount, "bundle channel count does not match variant");
  }
  if (pred.channels() != pred_main + (with_cpv ? kCpvChannels : 0)) {
    throw Error(ErrorCode::kWrongChannelCount, "prediction channel count does not match bundle");
  }
  if (!with_cpv) return main_loss(variant, pred, bundle);

  const Volume pred_main_part = slice_channels(pred, 0, pred_main);
  const Volume target_main_part = slice_channels(bundle, 0, target_main);
  return combined_loss([&] { return main_loss(variant, pred_main_part, target_main_part); },
                       slice_channels(pred, pred_main, kCpvChannels), slice_channels(bundle, target_main, kCpvChannels),
                       cast_volume<double>(foreground_mask(labels)), main_loss_weight(variant));
}

}  // namespace nucseg

// Copyright 2026 The hwnas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hwnas/error.hpp"
#include "hwnas/simd.hpp"

namespace hwnas::nn {

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

void kaiming_uniform(Tensor& w, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (auto& v : w.data()) v = rng.uniform(-bound, bound);
}

Tensor like4(std::size_t b, std::size_t c, std::size_t h, std::size_t w) { return Tensor({b, c, h, w}); }

class Conv final : public Layer {
 public:
  Conv(const ConvGeometry& g, bool bias, Rng& rng)
      : g_(g),
        pad_((g.kernel - 1) / 2),
        ho_((g.input.height + 2 * pad_ - g.kernel) / g.stride + 1),
        wo_((g.input.width + 2 * pad_ - g.kernel) / g.stride + 1),
        cin_g_(g.in_channels / g.groups),
        cout_g_(g.out_channels / g.groups),
        rows_(sz(cin_g_ * g.kernel * g.kernel)),
        pixels_(sz(ho_ * wo_)),
        direct_(g.kernel == 1 && g.stride == 1),
        weight_({sz(g.out_channels), sz(cin_g_), sz(g.kernel), sz(g.kernel)}) {
    kaiming_uniform(weight_.value, rows_, rng);
    if (bias) bias_.emplace(std::vector<std::size_t>{sz(g.out_channels)});
  }

  Tensor forward(const Tensor& x) override {
    const auto& k = simd::kernels();
    batch_ = x.dim(0);
    Tensor y = like4(batch_, sz(g_.out_channels), sz(ho_), sz(wo_));
    if (!direct_) {
      cols_.assign(batch_ * sz(g_.groups) * rows_ * pixels_, 0.0);
      for (std::size_t b = 0; b < batch_; ++b) {
        for (int grp = 0; grp < g_.groups; ++grp) im2col(x, b, grp, column(b, grp));
      }
    }
    for (std::size_t b = 0; b < batch_; ++b) {
      for (int grp = 0; grp < g_.groups; ++grp) {
        const double* col = direct_ ? x.raw() + (b * sz(g_.in_channels) + sz(grp * cin_g_)) * pixels_
                                    : column(b, grp);
        for (int o = 0; o < cout_g_; ++o) {
          const std::size_t oc = sz(grp * cout_g_ + o);
          double* yrow = y.raw() + (b * sz(g_.out_channels) + oc) * pixels_;
          std::fill(yrow, yrow + pixels_, bias_ ? bias_->value[oc] : 0.0);
          const double* w = weight_.value.raw() + oc * rows_;
          for (std::size_t r = 0; r < rows_; ++r) k.axpy(w[r], col + r * pixels_, yrow, pixels_);
        }
      }
    }
    if (direct_) x_ = x;
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    const auto& k = simd::kernels();
    Tensor dx = like4(batch_, sz(g_.in_channels), sz(g_.input.height), sz(g_.input.width));
    std::vector<double> dcol_buf(direct_ ? 0 : rows_ * pixels_);
    for (std::size_t b = 0; b < batch_; ++b) {
      for (int grp = 0; grp < g_.groups; ++grp) {
        const std::size_t in_offset = (b * sz(g_.in_channels) + sz(grp * cin_g_)) * pixels_;
        const double* col = direct_ ? x_.raw() + in_offset : column(b, grp);
        double* dcol = direct_ ? dx.raw() + in_offset : dcol_buf.data();
        if (!direct_) std::fill(dcol_buf.begin(), dcol_buf.end(), 0.0);
        for (int o = 0; o < cout_g_; ++o) {
          const std::size_t oc = sz(grp * cout_g_ + o);
          const double* dyrow = dy.raw() + (b * sz(g_.out_channels) + oc) * pixels_;
          if (bias_) {
            double s = 0.0;
            for (std::size_t p = 0; p < pixels_; ++p) s += dyrow[p];
            bias_->grad[oc] += s;
          }
          const double* w = weight_.value.raw() + oc * rows_;
          double* dw = weight_.grad.raw() + oc * rows_;
          for (std::size_t r = 0; r < rows_; ++r) {
            dw[r] += k.dot(dyrow, col + r * pixels_, pixels_);
            k.axpy(w[r], dyrow, dcol + r * pixels_, pixels_);
          }
        }
        if (!direct_) col2im(dcol, b, grp, dx);
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedParameter>& out) override {
    out.emplace_back(prefix + "weight", &weight_);
    if (bias_) out.emplace_back(prefix + "bias", &*bias_);
  }

  void clear() override {
    cols_.clear();
    cols_.shrink_to_fit();
    x_ = Tensor();
  }

 private:
  double* column(std::size_t b, int grp) {
    return cols_.data() + (b * sz(g_.groups) + sz(grp)) * rows_ * pixels_;
  }

  void im2col(const Tensor& x, std::size_t b, int grp, double* col) const {
    const int h = g_.input.height, w = g_.input.width, kk = g_.kernel;
    for (int cg = 0; cg < cin_g_; ++cg) {
      const double* plane = x.raw() + (b * sz(g_.in_channels) + sz(grp * cin_g_ + cg)) * sz(h * w);
      for (int kh = 0; kh < kk; ++kh) {
        for (int kw = 0; kw < kk; ++kw) {
          double* row = col + sz((cg * kk + kh) * kk + kw) * pixels_;
          for (int oh = 0; oh < ho_; ++oh) {
            const int ih = oh * g_.stride - pad_ + kh;
            if (ih < 0 || ih >= h) continue;
            for (int ow = 0; ow < wo_; ++ow) {
              const int iw = ow * g_.stride - pad_ + kw;
              if (iw >= 0 && iw < w) row[oh * wo_ + ow] = plane[ih * w + iw];
            }
          }
        }
      }
    }
  }

  void col2im(const double* col, std::size_t b, int grp, Tensor& dx) const {
    const int h = g_.input.height, w = g_.input.width, kk = g_.kernel;
    for (int cg = 0; cg < cin_g_; ++cg) {
      double* plane = dx.raw() + (b * sz(g_.in_channels) + sz(grp * cin_g_ + cg)) * sz(h * w);
      for (int kh = 0; kh < kk; ++kh) {
        for (int kw = 0; kw < kk; ++kw) {
          const double* row = col + sz((cg * kk + kh) * kk + kw) * pixels_;
          for (int oh = 0; oh < ho_; ++oh) {
            const int ih = oh * g_.stride - pad_ + kh;
            if (ih < 0 || ih >= h) continue;
            for (int ow = 0; ow < wo_; ++ow) {
              const int iw = ow * g_.stride - pad_ + kw;
              if (iw >= 0 && iw < w) plane[ih * w + iw] += row[oh * wo_ + ow];
            }
          }
        }
      }
    }
  }

  ConvGeometry g_;
  int pad_, ho_, wo_, cin_g_, cout_g_;
  std::size_t rows_, pixels_;
  bool direct_;
  Parameter weight_;
  std::optional<Parameter> bias_;
  std::size_t batch_ = 0;
  std::vector<double> cols_;
  Tensor x_;
};

class Affine final : public Layer {
 public:
  explicit Affine(int channels) : scale_({sz(channels)}), bias_({sz(channels)}) {
    scale_.value.fill(1.0);
  }

  Tensor forward(const Tensor& x) override {
    x_ = x;
    Tensor y(x.dims());
    const auto& k = simd::kernels();
    const std::size_t c = x.dim(1), plane = x.dim(2) * x.dim(3);
    for (std::size_t b = 0; b < x.dim(0); ++b) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const std::size_t off = (b * c + ch) * plane;
        k.scale_shift(scale_.value[ch], bias_.value[ch], x.raw() + off, y.raw() + off, plane);
      }
    }
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    Tensor dx(dy.dims());
    const auto& k = simd::kernels();
    const std::size_t c = dy.dim(1), plane = dy.dim(2) * dy.dim(3);
    for (std::size_t b = 0; b < dy.dim(0); ++b) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const std::size_t off = (b * c + ch) * plane;
        scale_.grad[ch] += k.dot(dy.raw() + off, x_.raw() + off, plane);
        double s = 0.0;
        for (std::size_t p = 0; p < plane; ++p) s += dy[off + p];
        bias_.grad[ch] += s;
        k.scale_shift(scale_.value[ch], 0.0, dy.raw() + off, dx.raw() + off, plane);
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedParameter>& out) override {
    out.emplace_back(prefix + "scale", &scale_);
    out.emplace_back(prefix + "bias", &bias_);
  }
  void clear() override { x_ = Tensor(); }

 private:
  Parameter scale_, bias_;
  Tensor x_;
};

class Relu final : public Layer {
 public:
  Tensor forward(const Tensor& x) override {
    x_ = x;
    Tensor y(x.dims());
    simd::kernels().relu(x.raw(), y.raw(), x.size());
    return y;
  }
  Tensor backward(const Tensor& dy) override {
    Tensor dx(dy.dims());
    simd::kernels().relu_backward(x_.raw(), dy.raw(), dx.raw(), dy.size());
    return dx;
  }
  void clear() override { x_ = Tensor(); }

 private:
  Tensor x_;
};

class LeakyRelu final : public Layer {
 public:
  LeakyRelu(int channels, double slope, bool per_channel) : fixed_slope_(slope) {
    if (per_channel) {
      slope_.emplace(std::vector<std::size_t>{sz(channels)});
      slope_->value.fill(slope);
    }
  }

  Tensor forward(const Tensor& x) override {
    x_ = x;
    Tensor y(x.dims());
    const std::size_t c = x.dim(1), plane = x.dim(2) * x.dim(3);
    for (std::size_t b = 0; b < x.dim(0); ++b) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double a = slope(ch);
        const std::size_t off = (b * c + ch) * plane;
        for (std::size_t p = 0; p < plane; ++p) {
          const double v = x[off + p];
          y[off + p] = v > 0.0 ? v : a * v;
        }
      }
    }
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    Tensor dx(dy.dims());
    const std::size_t c = dy.dim(1), plane = dy.dim(2) * dy.dim(3);
    for (std::size_t b = 0; b < dy.dim(0); ++b) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double a = slope(ch);
        const std::size_t off = (b * c + ch) * plane;
        double da = 0.0;
        for (std::size_t p = 0; p < plane; ++p) {
          const double v = x_[off + p];
          if (v > 0.0) {
            dx[off + p] = dy[off + p];
          } else {
            dx[off + p] = a * dy[off + p];
            da += v * dy[off + p];
          }
        }
        if (slope_) slope_->grad[ch] += da;
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedParameter>& out) override {
    if (slope_) out.emplace_back(prefix + "slope", &*slope_);
  }
  void clear() override { x_ = Tensor(); }

 private:
  double slope(std::size_t ch) const { return slope_ ? slope_->value[ch] : fixed_slope_; }

  double fixed_slope_;
  std::optional<Parameter> slope_;
  Tensor x_;
};

// Pooling windows use the same symmetric padding as convolution; padded
// positions are excluded (average over valid taps, max over valid taps).
class Pool final : public Layer {
 public:
  Pool(int kernel, int stride, bool is_max) : k_(kernel), s_(stride), max_(is_max) {}

  Tensor forward(const Tensor& x) override {
    in_dims_ = x.dims();
    const int c = static_cast<int>(x.dim(1)), h = static_cast<int>(x.dim(2)), w = static_cast<int>(x.dim(3));
    const int pad = (k_ - 1) / 2;
    const int ho = (h + 2 * pad - k_) / s_ + 1, wo = (w + 2 * pad - k_) / s_ + 1;
    Tensor y = like4(x.dim(0), sz(c), sz(ho), sz(wo));
    argmax_.assign(max_ ? y.size() : 0, 0);
    std::size_t idx = 0;
    for (std::size_t b = 0; b < x.dim(0); ++b) {
      for (int ch = 0; ch < c; ++ch) {
        const std::size_t base = (b * sz(c) + sz(ch)) * sz(h * w);
        for (int oh = 0; oh < ho; ++oh) {
          for (int ow = 0; ow < wo; ++ow, ++idx) {
            double acc = max_ ? -std::numeric_limits<double>::infinity() : 0.0;
            std::size_t best = 0;
            int count = 0;
            for (int kh = 0; kh < k_; ++kh) {
              const int ih = oh * s_ - pad + kh;
              if (ih < 0 || ih >= h) continue;
              for (int kw = 0; kw < k_; ++kw) {
                const int iw = ow * s_ - pad + kw;
                if (iw < 0 || iw >= w) continue;
                const std::size_t at = base + sz(ih * w + iw);
                if (max_) {
                  if (x[at] > acc || count == 0) {
                    acc = x[at];
                    best = at;
                  }
                } else {
                  acc += x[at];
                }
                ++count;
              }
            }
            if (max_) {
              y[idx] = acc;
              argmax_[idx] = best;
            } else {
              y[idx] = acc / count;
            }
          }
        }
      }
    }
    out_dims_ = y.dims();
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    Tensor dx(in_dims_);
    if (max_) {
      for (std::size_t i = 0; i < dy.size(); ++i) dx[argmax_[i]] += dy[i];
      return dx;
    }
    const int c = static_cast<int>(in_dims_[1]), h = static_cast<int>(in_dims_[2]), w = static_cast<int>(in_dims_[3]);
    const int ho = static_cast<int>(out_dims_[2]), wo = static_cast<int>(out_dims_[3]);
    const int pad = (k_ - 1) / 2;
    std::size_t idx = 0;
    for (std::size_t b = 0; b < in_dims_[0]; ++b) {
      for (int ch = 0; ch < c; ++ch) {
        const std::size_t base = (b * sz(c) + sz(ch)) * sz(h * w);
        for (int oh = 0; oh < ho; ++oh) {
          for (int ow = 0; ow < wo; ++ow, ++idx) {
            const int h0 = std::max(0, oh * s_ - pad), h1 = std::min(h, oh * s_ - pad + k_);
            const int w0 = std::max(0, ow * s_ - pad), w1 = std::min(w, ow * s_ - pad + k_);
            const double g = dy[idx] / ((h1 - h0) * (w1 - w0));
            for (int ih = h0; ih < h1; ++ih) {
              for (int iw = w0; iw < w1; ++iw) dx[base + sz(ih * w + iw)] += g;
            }
          }
        }
      }
    }
    return dx;
  }

  void clear() override { argmax_.clear(); }

 private:
  int k_, s_;
  bool max_;
  std::vector<std::size_t> in_dims_, out_dims_;
  std::vector<std::size_t> argmax_;
};

class UpsampleNearest final : public Layer {
 public:
  explicit UpsampleNearest(int scale) : s_(scale) {}

  Tensor forward(const Tensor& x) override {
    in_dims_ = x.dims();
    const std::size_t n = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3), s = sz(s_);
    Tensor y = like4(x.dim(0), x.dim(1), h * s, w * s);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t oh = 0; oh < h * s; ++oh) {
        for (std::size_t ow = 0; ow < w * s; ++ow) {
          y[(p * h * s + oh) * w * s + ow] = x[(p * h + oh / s) * w + ow / s];
        }
      }
    }
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    Tensor dx(in_dims_);
    const std::size_t n = in_dims_[0] * in_dims_[1], h = in_dims_[2], w = in_dims_[3], s = sz(s_);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t oh = 0; oh < h * s; ++oh) {
        for (std::size_t ow = 0; ow < w * s; ++ow) {
          dx[(p * h + oh / s) * w + ow / s] += dy[(p * h * s + oh) * w * s + ow];
        }
      }
    }
    return dx;
  }

 private:
  int s_;
  std::vector<std::size_t> in_dims_;
};

// Align-corners bilinear interpolation: output corners map exactly onto
// input corners, src = dst * (in - 1) / (out - 1).
class UpsampleBilinear final : public Layer {
 public:
  explicit UpsampleBilinear(int scale) : s_(scale) {}

  Tensor forward(const Tensor& x) override {
    in_dims_ = x.dims();
    Tensor y = like4(x.dim(0), x.dim(1), x.dim(2) * sz(s_), x.dim(3) * sz(s_));
    visit([&](std::size_t out, std::size_t in, double weight) { y[out] += weight * x[in]; });
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    Tensor dx(in_dims_);
    visit([&](std::size_t out, std::size_t in, double weight) { dx[in] += weight * dy[out]; });
    return dx;
  }

 private:
  struct Tap {
    std::size_t lo, hi;
    double frac;
  };

  static std::vector<Tap> taps(std::size_t in, std::size_t out) {
    std::vector<Tap> t(out);
    for (std::size_t o = 0; o < out; ++o) {
      const double src = out > 1 ? static_cast<double>(o) * static_cast<double>(in - 1) /
                                       static_cast<double>(out - 1)
                                 : 0.0;
      const auto lo = std::min(static_cast<std::size_t>(std::floor(src)), in - 1);
      t[o] = {lo, std::min(lo + 1, in - 1), src - static_cast<double>(lo)};
    }
    return t;
  }

  template <typename Fn>
  void visit(Fn&& fn) const {
    const std::size_t n = in_dims_[0] * in_dims_[1], h = in_dims_[2], w = in_dims_[3];
    const std::size_t ho = h * sz(s_), wo = w * sz(s_);
    const auto th = taps(h, ho), tw = taps(w, wo);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t oh = 0; oh < ho; ++oh) {
        for (std::size_t ow = 0; ow < wo; ++ow) {
          const std::size_t out = (p * ho + oh) * wo + ow;
          const auto& a = th[oh];
          const auto& b = tw[ow];
          fn(out, (p * h + a.lo) * w + b.lo, (1 - a.frac) * (1 - b.frac));
          fn(out, (p * h + a.lo) * w + b.hi, (1 - a.frac) * b.frac);
          fn(out, (p * h + a.hi) * w + b.lo, a.frac * (1 - b.frac));
          fn(out, (p * h + a.hi) * w + b.hi, a.frac * b.frac);
        }
      }
    }
  }

  int s_;
  std::vector<std::size_t> in_dims_;
};

// CRD ordering: out[c, h*s + i, w*s + j] = in[c*s*s + i*s + j, h, w].
class DepthToSpace final : public Layer {
 public:
  explicit DepthToSpace(int scale) : s_(scale) {}

  Tensor forward(const Tensor& x) override {
    in_dims_ = x.dims();
    Tensor y = like4(x.dim(0), x.dim(1) / sz(s_ * s_), x.dim(2) * sz(s_), x.dim(3) * sz(s_));
    visit([&](std::size_t out, std::size_t in) { y[out] = x[in]; });
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    Tensor dx(in_dims_);
    visit([&](std::size_t out, std::size_t in) { dx[in] = dy[out]; });
    return dx;
  }

 private:
  template <typename Fn>
  void visit(Fn&& fn) const {
    const std::size_t s = sz(s_), cin = in_dims_[1], h = in_dims_[2], w = in_dims_[3];
    const std::size_t cout = cin / (s * s);
    for (std::size_t b = 0; b < in_dims_[0]; ++b) {
      for (std::size_t c = 0; c < cout; ++c) {
        for (std::size_t i = 0; i < s; ++i) {
          for (std::size_t j = 0; j < s; ++j) {
            const std::size_t ic = c * s * s + i * s + j;
            for (std::size_t ih = 0; ih < h; ++ih) {
              for (std::size_t iw = 0; iw < w; ++iw) {
                const std::size_t in = ((b * cin + ic) * h + ih) * w + iw;
                const std::size_t out = ((b * cout + c) * h * s + ih * s + i) * w * s + iw * s + j;
                fn(out, in);
              }
            }
          }
        }
      }
    }
  }

  int s_;
  std::vector<std::size_t> in_dims_;
};

class Linear final : public Layer {
 public:
  Linear(int in, int out, Rng& rng) : in_(sz(in)), out_(sz(out)), weight_({sz(out), sz(in)}), bias_({sz(out)}) {
    kaiming_uniform(weight_.value, in_, rng);
  }

  Tensor forward(const Tensor& x) override {
    x_ = x;
    const auto& k = simd::kernels();
    const std::size_t batch = x.dim(0);
    Tensor y = like4(batch, out_, 1, 1);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t o = 0; o < out_; ++o) {
        y[b * out_ + o] = bias_.value[o] + k.dot(weight_.value.raw() + o * in_, x.raw() + b * in_, in_);
      }
    }
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    const auto& k = simd::kernels();
    Tensor dx(x_.dims());
    for (std::size_t b = 0; b < x_.dim(0); ++b) {
      for (std::size_t o = 0; o < out_; ++o) {
        const double g = dy[b * out_ + o];
        bias_.grad[o] += g;
        k.axpy(g, x_.raw() + b * in_, weight_.grad.raw() + o * in_, in_);
        k.axpy(g, weight_.value.raw() + o * in_, dx.raw() + b * in_, in_);
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedParameter>& out) override {
    out.emplace_back(prefix + "weight", &weight_);
    out.emplace_back(prefix + "bias", &bias_);
  }
  void clear() override { x_ = Tensor(); }

 private:
  std::size_t in_, out_;
  Parameter weight_, bias_;
  Tensor x_;
};

class Identity final : public Layer {
 public:
  Tensor forward(const Tensor& x) override { return x; }
  Tensor backward(const Tensor& dy) override { return dy; }
};

}  // namespace

std::unique_ptr<Layer> make_conv(const ConvGeometry& g, bool bias, Rng& rng) {
  return std::make_unique<Conv>(g, bias, rng);
}
std::unique_ptr<Layer> make_affine(int channels) { return std::make_unique<Affine>(channels); }
std::unique_ptr<Layer> make_relu() { return std::make_unique<Relu>(); }
std::unique_ptr<Layer> make_leaky_relu(int channels, double slope, bool per_channel) {
  return std::make_unique<LeakyRelu>(channels, slope, per_channel);
}
std::unique_ptr<Layer> make_avg_pool(int kernel, int stride) { return std::make_unique<Pool>(kernel, stride, false); }
std::unique_ptr<Layer> make_max_pool(int kernel, int stride) { return std::make_unique<Pool>(kernel, stride, true); }
std::unique_ptr<Layer> make_upsample_nearest(int scale) { return std::make_unique<UpsampleNearest>(scale); }
std::unique_ptr<Layer> make_upsample_bilinear(int scale) { return std::make_unique<UpsampleBilinear>(scale); }
std::unique_ptr<Layer> make_depth_to_space(int scale) { return std::make_unique<DepthToSpace>(scale); }
std::unique_ptr<Layer> make_linear(int in_features, int out_features, Rng& rng) {
  return std::make_unique<Linear>(in_features, out_features, rng);
}
std::unique_ptr<Layer> make_identity() { return std::make_unique<Identity>(); }

}  // namespace hwnas::nn

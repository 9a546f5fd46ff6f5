// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#include "rgbdfill/tiny_net.hpp"

#include <omp.h>

#include <Eigen/Core>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace rgbdfill {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<RowMat>;
using CMapRM = Eigen::Map<const RowMat>;

constexpr int kInChannels = 8;
constexpr int kOutChannels = 4;
constexpr double kNormEps = 1e-5;

struct Conv {
  int cin = 0, cout = 0, stride = 1;
  std::size_t w = 0, b = 0;
};
struct Norm {
  int c = 0;
  std::size_t g = 0, b = 0;
};
struct Dense {
  int in = 0, out = 0;
  std::size_t w = 0, b = 0;
};
struct Res {
  Norm n1;
  Conv c1;
  Dense time;
  Norm n2;
  Conv c2;
};
struct Arch {
  Dense time_fc;
  Conv conv_in;
  Res rb1;
  Conv down1;
  Res rb2;
  Conv down2;
  Res rb3;
  Conv up2;
  Norm n_m2;
  Conv merge2;
  Conv up1;
  Norm n_m1;
  Conv merge1;
  Norm n_out;
  Conv conv_out;
};

class Builder {
 public:
  std::size_t add(const std::string& name, std::vector<int> shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    slots.push_back({name, std::move(shape), total, n});
    total += n;
    return slots.back().offset;
  }
  Conv conv(const std::string& name, int cin, int cout, int stride = 1) {
    Conv c{cin, cout, stride};
    c.w = add(name + ".weight", {cout, cin, 3, 3});
    c.b = add(name + ".bias", {cout});
    return c;
  }
  Norm norm(const std::string& name, int c) {
    Norm n{c};
    n.g = add(name + ".gain", {c});
    n.b = add(name + ".bias", {c});
    return n;
  }
  Dense dense(const std::string& name, int in, int out) {
    Dense d{in, out};
    d.w = add(name + ".weight", {out, in});
    d.b = add(name + ".bias", {out});
    return d;
  }
  Res res(const std::string& name, int c, int th) {
    Res r;
    r.n1 = norm(name + ".norm1", c);
    r.c1 = conv(name + ".conv1", c, c);
    r.time = dense(name + ".time", th, c);
    r.n2 = norm(name + ".norm2", c);
    r.c2 = conv(name + ".conv2", c, c);
    return r;
  }

  std::vector<ParamSlot> slots;
  std::size_t total = 0;
};

Arch build(const TinyNetConfig& cfg, Builder& b) {
  const auto [c1, c2, c3] = cfg.widths;
  Arch a;
  a.time_fc = b.dense("time_fc", cfg.time_dim, cfg.time_hidden);
  a.conv_in = b.conv("conv_in", kInChannels, c1);
  a.rb1 = b.res("enc1", c1, cfg.time_hidden);
  a.down1 = b.conv("down1", c1, c2, 2);
  a.rb2 = b.res("enc2", c2, cfg.time_hidden);
  a.down2 = b.conv("down2", c2, c3, 2);
  a.rb3 = b.res("mid", c3, cfg.time_hidden);
  a.up2 = b.conv("up2", c3, c2);
  a.n_m2 = b.norm("dec2.norm", 2 * c2);
  a.merge2 = b.conv("dec2.conv", 2 * c2, c2);
  a.up1 = b.conv("up1", c2, c1);
  a.n_m1 = b.norm("dec1.norm", 2 * c1);
  a.merge1 = b.conv("dec1.conv", 2 * c1, c1);
  a.n_out = b.norm("out.norm", c1);
  a.conv_out = b.conv("out.conv", c1, kOutChannels);
  return a;
}

struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<double> v;

  void resize(int cc, int hh, int ww) {
    c = cc;
    h = hh;
    w = ww;
    v.assign(static_cast<std::size_t>(cc) * hh * ww, 0.0);
  }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  double* data() { return v.data(); }
  const double* data() const { return v.data(); }
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void im2col(const Tensor& in, int stride, int ho, int wo, std::vector<double>& col) {
  const std::size_t n = static_cast<std::size_t>(ho) * wo;
  col.assign(static_cast<std::size_t>(in.c) * 9 * n, 0.0);
  for (int ci = 0; ci < in.c; ++ci) {
    const double* src = in.data() + ci * in.plane();
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        double* dst = col.data() + (static_cast<std::size_t>(ci) * 9 + ky * 3 + kx) * n;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= in.h) continue;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride + kx - 1;
            if (ix >= 0 && ix < in.w) dst[oy * wo + ox] = src[iy * in.w + ix];
          }
        }
      }
    }
  }
}

void col2im_add(const std::vector<double>& col, int stride, int ho, int wo, Tensor& din) {
  const std::size_t n = static_cast<std::size_t>(ho) * wo;
  for (int ci = 0; ci < din.c; ++ci) {
    double* dst = din.data() + ci * din.plane();
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const double* src = col.data() + (static_cast<std::size_t>(ci) * 9 + ky * 3 + kx) * n;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= din.h) continue;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride + kx - 1;
            if (ix >= 0 && ix < din.w) dst[iy * din.w + ix] += src[oy * wo + ox];
          }
        }
      }
    }
  }
}

struct ConvCache {
  std::vector<double> col;
  std::vector<double> dcol;
};

void conv_fwd(const Conv& cv, const double* p, const Tensor& in, Tensor& out, ConvCache& cache) {
  const int ho = (in.h - 1) / cv.stride + 1;
  const int wo = (in.w - 1) / cv.stride + 1;
  out.resize(cv.cout, ho, wo);
  im2col(in, cv.stride, ho, wo, cache.col);
  const int n = ho * wo;
  CMapRM w(p + cv.w, cv.cout, cv.cin * 9);
  CMapRM col(cache.col.data(), cv.cin * 9, n);
  MapRM o(out.data(), cv.cout, n);
  o.noalias() = w * col;
  for (int co = 0; co < cv.cout; ++co) o.row(co).array() += p[cv.b + co];
}

/// Accumulates parameter gradients; writes the input gradient into `din`
/// (overwriting) unless it is null.
void conv_bwd(const Conv& cv, const double* p, double* g, ConvCache& cache, const Tensor& dout, Tensor* din, int in_h,
              int in_w) {
  const int n = dout.h * dout.w;
  CMapRM d(dout.data(), cv.cout, n);
  CMapRM col(cache.col.data(), cv.cin * 9, n);
  MapRM gw(g + cv.w, cv.cout, cv.cin * 9);
  gw.noalias() += d * col.transpose();
  // Plain loop: Eigen's vectorized reductions peel by address, which would
  // make the summation order depend on allocation alignment.
  for (int co = 0; co < cv.cout; ++co) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += dout.v[static_cast<std::size_t>(co) * n + i];
    g[cv.b + co] += s;
  }
  if (din == nullptr) return;
  cache.dcol.resize(static_cast<std::size_t>(cv.cin) * 9 * n);
  CMapRM w(p + cv.w, cv.cout, cv.cin * 9);
  MapRM dcol(cache.dcol.data(), cv.cin * 9, n);
  dcol.noalias() = w.transpose() * d;
  din->resize(cv.cin, in_h, in_w);
  col2im_add(cache.dcol, cv.stride, dout.h, dout.w, *din);
}

struct NormCache {
  Tensor xhat;
  double rstd = 0.0;
};

void norm_fwd(const Norm& nm, const double* p, const Tensor& in, Tensor& out, NormCache& cache) {
  const std::size_t n = in.v.size();
  double mean = 0.0;
  for (double x : in.v) mean += x;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double x : in.v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n);
  cache.rstd = 1.0 / std::sqrt(var + kNormEps);
  cache.xhat.resize(in.c, in.h, in.w);
  out.resize(in.c, in.h, in.w);
  const std::size_t plane = in.plane();
  for (int c = 0; c < in.c; ++c) {
    const double gain = p[nm.g + c];
    const double bias = p[nm.b + c];
    for (std::size_t i = c * plane; i < (c + 1) * plane; ++i) {
      const double xh = (in.v[i] - mean) * cache.rstd;
      cache.xhat.v[i] = xh;
      out.v[i] = xh * gain + bias;
    }
  }
}

void norm_bwd(const Norm& nm, const double* p, double* g, const NormCache& cache, const Tensor& dout, Tensor& din) {
  const std::size_t n = dout.v.size();
  const std::size_t plane = dout.plane();
  din.resize(dout.c, dout.h, dout.w);
  double sum_dxh = 0.0;
  double sum_dxh_xh = 0.0;
  for (int c = 0; c < dout.c; ++c) {
    const double gain = p[nm.g + c];
    double gg = 0.0;
    double gb = 0.0;
    for (std::size_t i = c * plane; i < (c + 1) * plane; ++i) {
      gg += dout.v[i] * cache.xhat.v[i];
      gb += dout.v[i];
      const double dxh = dout.v[i] * gain;
      din.v[i] = dxh;
      sum_dxh += dxh;
      sum_dxh_xh += dxh * cache.xhat.v[i];
    }
    g[nm.g + c] += gg;
    g[nm.b + c] += gb;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    din.v[i] = cache.rstd * (din.v[i] - sum_dxh * inv_n - cache.xhat.v[i] * sum_dxh_xh * inv_n);
  }
}

void silu_fwd(const Tensor& in, Tensor& out) {
  out.resize(in.c, in.h, in.w);
  for (std::size_t i = 0; i < in.v.size(); ++i) out.v[i] = in.v[i] * sigmoid(in.v[i]);
}

void silu_bwd(const Tensor& in, const Tensor& dout, Tensor& din) {
  din.resize(in.c, in.h, in.w);
  for (std::size_t i = 0; i < in.v.size(); ++i) {
    const double s = sigmoid(in.v[i]);
    din.v[i] = dout.v[i] * s * (1.0 + in.v[i] * (1.0 - s));
  }
}

void upsample_fwd(const Tensor& in, Tensor& out) {
  out.resize(in.c, in.h * 2, in.w * 2);
  for (int c = 0; c < in.c; ++c)
    for (int y = 0; y < out.h; ++y)
      for (int x = 0; x < out.w; ++x)
        out.v[c * out.plane() + y * out.w + x] = in.v[c * in.plane() + (y / 2) * in.w + x / 2];
}

void upsample_bwd(const Tensor& dout, Tensor& din) {
  din.resize(dout.c, dout.h / 2, dout.w / 2);
  for (int c = 0; c < dout.c; ++c)
    for (int y = 0; y < dout.h; ++y)
      for (int x = 0; x < dout.w; ++x)
        din.v[c * din.plane() + (y / 2) * din.w + x / 2] += dout.v[c * dout.plane() + y * dout.w + x];
}

void concat(const Tensor& a, const Tensor& b, Tensor& out) {
  out.resize(a.c + b.c, a.h, a.w);
  std::copy(a.v.begin(), a.v.end(), out.v.begin());
  std::copy(b.v.begin(), b.v.end(), out.v.begin() + static_cast<std::ptrdiff_t>(a.v.size()));
}

void split(const Tensor& in, int ca, Tensor& a, Tensor& b) {
  a.resize(ca, in.h, in.w);
  b.resize(in.c - ca, in.h, in.w);
  std::copy(in.v.begin(), in.v.begin() + static_cast<std::ptrdiff_t>(a.v.size()), a.v.begin());
  std::copy(in.v.begin() + static_cast<std::ptrdiff_t>(a.v.size()), in.v.end(), b.v.begin());
}

void dense_fwd(const Dense& d, const double* p, const std::vector<double>& in, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(d.out), 0.0);
  for (int o = 0; o < d.out; ++o) {
    double s = p[d.b + o];
    for (int i = 0; i < d.in; ++i) s += p[d.w + static_cast<std::size_t>(o) * d.in + i] * in[i];
    out[o] = s;
  }
}

void dense_bwd(const Dense& d, const double* p, double* g, const std::vector<double>& in,
               const std::vector<double>& dout, std::vector<double>* din) {
  for (int o = 0; o < d.out; ++o) {
    g[d.b + o] += dout[o];
    for (int i = 0; i < d.in; ++i) g[d.w + static_cast<std::size_t>(o) * d.in + i] += dout[o] * in[i];
  }
  if (din == nullptr) return;
  for (int o = 0; o < d.out; ++o)
    for (int i = 0; i < d.in; ++i) (*din)[i] += p[d.w + static_cast<std::size_t>(o) * d.in + i] * dout[o];
}

struct ResCache {
  NormCache n1, n2;
  Tensor a1, s1, c1, a2, s2, c2;
  ConvCache cc1, cc2;
  std::vector<double> tproj;
};

void res_fwd(const Res& r, const double* p, const Tensor& x, const std::vector<double>& th, Tensor& y, ResCache& k) {
  norm_fwd(r.n1, p, x, k.a1, k.n1);
  silu_fwd(k.a1, k.s1);
  conv_fwd(r.c1, p, k.s1, k.c1, k.cc1);
  dense_fwd(r.time, p, th, k.tproj);
  for (int c = 0; c < k.c1.c; ++c)
    for (std::size_t i = 0; i < k.c1.plane(); ++i) k.c1.v[c * k.c1.plane() + i] += k.tproj[c];
  norm_fwd(r.n2, p, k.c1, k.a2, k.n2);
  silu_fwd(k.a2, k.s2);
  conv_fwd(r.c2, p, k.s2, k.c2, k.cc2);
  y = x;
  for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += k.c2.v[i];
}

struct ResGradScratch {
  Tensor t1, t2;
  std::vector<double> dt;
};

/// dx is overwritten; dth is accumulated.
void res_bwd(const Res& r, const double* p, double* g, ResCache& k, const std::vector<double>& th, const Tensor& dy,
             Tensor& dx, std::vector<double>& dth, ResGradScratch& s) {
  conv_bwd(r.c2, p, g, k.cc2, dy, &s.t1, k.s2.h, k.s2.w);
  silu_bwd(k.a2, s.t1, s.t2);
  norm_bwd(r.n2, p, g, k.n2, s.t2, s.t1);  // s.t1 = d(c1 + tproj)
  s.dt.assign(static_cast<std::size_t>(s.t1.c), 0.0);
  for (int c = 0; c < s.t1.c; ++c)
    for (std::size_t i = 0; i < s.t1.plane(); ++i) s.dt[c] += s.t1.v[c * s.t1.plane() + i];
  dense_bwd(r.time, p, g, th, s.dt, &dth);
  conv_bwd(r.c1, p, g, k.cc1, s.t1, &s.t2, k.s1.h, k.s1.w);
  silu_bwd(k.a1, s.t2, s.t1);
  norm_bwd(r.n1, p, g, k.n1, s.t1, dx);
  for (std::size_t i = 0; i < dx.v.size(); ++i) dx.v[i] += dy.v[i];
}

std::vector<double> time_embedding(int t, int dim) {
  std::vector<double> e(static_cast<std::size_t>(dim));
  const int half = dim / 2;
  for (int i = 0; i < half; ++i) {
    const double f = std::exp(-std::log(10000.0) * i / half);
    e[i] = std::sin(t * f);
    e[i + half] = std::cos(t * f);
  }
  return e;
}

/// Activations kept for the backward pass.
struct Workspace {
  std::vector<double> emb, th_pre, th;
  Tensor in, h0, r1, d1, r2, d2, r3;
  ConvCache cc_in, cc_d1, cc_d2, cc_up2, cc_m2, cc_up1, cc_m1, cc_out;
  ResCache k1, k2, k3;
  Tensor ur3, u2, cat2, a_m2, s_m2, m2, um2, u1, cat1, a_m1, s_m1, m1, a_out, s_out, out;
  NormCache nk_m2, nk_m1, nk_out;
  // gradients
  Tensor g0, g1, g2, g3, g4;
  std::vector<double> dth;
  ResGradScratch scratch;
};

class Net {
 public:
  explicit Net(const TinyNetConfig& cfg) : cfg_(cfg) {
    Builder b;
    arch_ = build(cfg, b);
  }

  void forward(const double* p, const Image4& x_t, const Image4& cond, int t, Workspace& w) const {
    const int r = cfg_.resolution;
    w.emb = time_embedding(t, cfg_.time_dim);
    dense_fwd(arch_.time_fc, p, w.emb, w.th_pre);
    w.th.resize(w.th_pre.size());
    for (std::size_t i = 0; i < w.th.size(); ++i) w.th[i] = w.th_pre[i] * sigmoid(w.th_pre[i]);

    w.in.resize(kInChannels, r, r);
    const std::size_t plane = w.in.plane();
    for (std::size_t px = 0; px < plane; ++px) {
      for (int c = 0; c < 4; ++c) {
        w.in.v[c * plane + px] = x_t.values[px * 4 + c];
        w.in.v[(c + 4) * plane + px] = cond.values[px * 4 + c];
      }
    }
    conv_fwd(arch_.conv_in, p, w.in, w.h0, w.cc_in);
    res_fwd(arch_.rb1, p, w.h0, w.th, w.r1, w.k1);
    conv_fwd(arch_.down1, p, w.r1, w.d1, w.cc_d1);
    res_fwd(arch_.rb2, p, w.d1, w.th, w.r2, w.k2);
    conv_fwd(arch_.down2, p, w.r2, w.d2, w.cc_d2);
    res_fwd(arch_.rb3, p, w.d2, w.th, w.r3, w.k3);

    upsample_fwd(w.r3, w.ur3);
    conv_fwd(arch_.up2, p, w.ur3, w.u2, w.cc_up2);
    concat(w.u2, w.r2, w.cat2);
    norm_fwd(arch_.n_m2, p, w.cat2, w.a_m2, w.nk_m2);
    silu_fwd(w.a_m2, w.s_m2);
    conv_fwd(arch_.merge2, p, w.s_m2, w.m2, w.cc_m2);

    upsample_fwd(w.m2, w.um2);
    conv_fwd(arch_.up1, p, w.um2, w.u1, w.cc_up1);
    concat(w.u1, w.r1, w.cat1);
    norm_fwd(arch_.n_m1, p, w.cat1, w.a_m1, w.nk_m1);
    silu_fwd(w.a_m1, w.s_m1);
    conv_fwd(arch_.merge1, p, w.s_m1, w.m1, w.cc_m1);

    norm_fwd(arch_.n_out, p, w.m1, w.a_out, w.nk_out);
    silu_fwd(w.a_out, w.s_out);
    conv_fwd(arch_.conv_out, p, w.s_out, w.out, w.cc_out);
  }

  /// `dout` is the loss gradient w.r.t. the output tensor; parameter
  /// gradients are added into g.
  void backward(const double* p, double* g, Workspace& w, const Tensor& dout) const {
    const int c1 = cfg_.widths[0];
    const int c2 = cfg_.widths[1];
    w.dth.assign(w.th.size(), 0.0);

    conv_bwd(arch_.conv_out, p, g, w.cc_out, dout, &w.g0, w.s_out.h, w.s_out.w);
    silu_bwd(w.a_out, w.g0, w.g1);
    norm_bwd(arch_.n_out, p, g, w.nk_out, w.g1, w.g0);  // g0 = dm1

    conv_bwd(arch_.merge1, p, g, w.cc_m1, w.g0, &w.g1, w.s_m1.h, w.s_m1.w);
    silu_bwd(w.a_m1, w.g1, w.g2);
    norm_bwd(arch_.n_m1, p, g, w.nk_m1, w.g2, w.g1);  // g1 = dcat1
    Tensor du1, dr1;
    split(w.g1, c1, du1, dr1);
    conv_bwd(arch_.up1, p, g, w.cc_up1, du1, &w.g2, w.um2.h, w.um2.w);
    upsample_bwd(w.g2, w.g0);  // g0 = dm2

    conv_bwd(arch_.merge2, p, g, w.cc_m2, w.g0, &w.g1, w.s_m2.h, w.s_m2.w);
    silu_bwd(w.a_m2, w.g1, w.g2);
    norm_bwd(arch_.n_m2, p, g, w.nk_m2, w.g2, w.g1);  // g1 = dcat2
    Tensor du2, dr2;
    split(w.g1, c2, du2, dr2);
    conv_bwd(arch_.up2, p, g, w.cc_up2, du2, &w.g2, w.ur3.h, w.ur3.w);
    upsample_bwd(w.g2, w.g0);  // g0 = dr3

    res_bwd(arch_.rb3, p, g, w.k3, w.th, w.g0, w.g1, w.dth, w.scratch);  // g1 = dd2
    conv_bwd(arch_.down2, p, g, w.cc_d2, w.g1, &w.g2, w.r2.h, w.r2.w);
    for (std::size_t i = 0; i < dr2.v.size(); ++i) dr2.v[i] += w.g2.v[i];
    res_bwd(arch_.rb2, p, g, w.k2, w.th, dr2, w.g1, w.dth, w.scratch);  // g1 = dd1
    conv_bwd(arch_.down1, p, g, w.cc_d1, w.g1, &w.g2, w.r1.h, w.r1.w);
    for (std::size_t i = 0; i < dr1.v.size(); ++i) dr1.v[i] += w.g2.v[i];
    res_bwd(arch_.rb1, p, g, w.k1, w.th, dr1, w.g1, w.dth, w.scratch);  // g1 = dh0
    conv_bwd(arch_.conv_in, p, g, w.cc_in, w.g1, nullptr, 0, 0);

    std::vector<double> dpre(w.dth.size());
    for (std::size_t i = 0; i < dpre.size(); ++i) {
      const double s = sigmoid(w.th_pre[i]);
      dpre[i] = w.dth[i] * s * (1.0 + w.th_pre[i] * (1.0 - s));
    }
    dense_bwd(arch_.time_fc, p, g, w.emb, dpre, nullptr);
  }

  const Arch& arch() const { return arch_; }

 private:
  TinyNetConfig cfg_;
  Arch arch_;
};

void check_inputs(const TinyNetParams& params, const Image4& x_t, const Image4& cond) {
  const int r = params.config().resolution;
  if (x_t.width != r || x_t.height != r)
    fail(ErrorCode::kShapeMismatch, "network expects " + std::to_string(r) + "x" + std::to_string(r) + " input");
  if (!cond.same_shape(x_t)) fail(ErrorCode::kShapeMismatch, "condition and x_t differ in size");
}

Image4 output_image(const Tensor& out) {
  Image4 img(out.w, out.h);
  const std::size_t plane = out.plane();
  for (std::size_t px = 0; px < plane; ++px)
    for (int c = 0; c < 4; ++c) img.values[px * 4 + c] = out.v[c * plane + px];
  return img;
}

double loss_with_workspace(const Net& net, const TinyNetParams& params, const Image4& x_t, const Image4& cond, int t,
                           const Image4& eps, std::span<double> grad, Workspace& w) {
  check_inputs(params, x_t, cond);
  if (!eps.same_shape(x_t)) fail(ErrorCode::kShapeMismatch, "noise target and x_t differ in size");
  net.forward(params.values().data(), x_t, cond, t, w);
  const std::size_t plane = w.out.plane();
  const double inv_n = 1.0 / static_cast<double>(w.out.v.size());
  Tensor dout;
  dout.resize(w.out.c, w.out.h, w.out.w);
  double loss = 0.0;
  for (std::size_t px = 0; px < plane; ++px) {
    for (int c = 0; c < 4; ++c) {
      const double diff = w.out.v[c * plane + px] - eps.values[px * 4 + c];
      loss += diff * diff;
      dout.v[c * plane + px] = 2.0 * diff * inv_n;
    }
  }
  loss *= inv_n;
  if (!grad.empty()) {
    if (grad.size() != params.size()) fail(ErrorCode::kShapeMismatch, "gradient buffer size");
    net.backward(params.values().data(), grad.data(), w, dout);
  }
  return loss;
}

void write_u64_le(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

}  // namespace

void TinyNetConfig::validate() const {
  if (resolution < 4 || resolution % 4 != 0)
    fail(ErrorCode::kInvalidConfig, "network resolution must be a positive multiple of 4");
  for (int w : widths)
    if (w <= 0) fail(ErrorCode::kInvalidConfig, "network widths must be positive");
  if (time_dim <= 0 || time_dim % 2 != 0) fail(ErrorCode::kInvalidConfig, "time_dim must be positive and even");
  if (time_hidden <= 0) fail(ErrorCode::kInvalidConfig, "time_hidden must be positive");
}

std::vector<ParamSlot> tiny_net_layout(const TinyNetConfig& config) {
  config.validate();
  Builder b;
  build(config, b);
  return b.slots;
}

TinyNetParams TinyNetParams::zeros(const TinyNetConfig& config) {
  TinyNetParams p;
  p.config_ = config;
  p.slots_ = tiny_net_layout(config);
  const auto& last = p.slots_.back();
  p.values_.assign(last.offset + last.size, 0.0);
  return p;
}

TinyNetParams TinyNetParams::random(const TinyNetConfig& config, std::uint64_t seed) {
  TinyNetParams p = zeros(config);
  Rng rng(seed);
  for (const auto& s : p.slots_) {
    auto v = std::span<double>(p.values_).subspan(s.offset, s.size);
    const auto ends_with = [&](std::string_view suffix) { return s.name.ends_with(suffix); };
    if (ends_with(".gain")) {
      std::fill(v.begin(), v.end(), 1.0);
    } else if (ends_with(".weight")) {
      std::size_t fan_in = 1;
      for (std::size_t i = 1; i < s.shape.size(); ++i) fan_in *= static_cast<std::size_t>(s.shape[i]);
      const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (double& x : v) x = scale * rng.normal();
      if (s.name == "conv_in.weight") {
        // Input channels 4..7 carry the condition.
        const int cout = s.shape[0];
        for (int co = 0; co < cout; ++co)
          for (std::size_t k = 4 * 9; k < 8 * 9; ++k) v[co * 8 * 9 + k] = 0.0;
      }
    }
  }
  return p;
}

std::span<double> TinyNetParams::slot(std::string_view name) {
  for (const auto& s : slots_)
    if (s.name == name) return std::span<double>(values_).subspan(s.offset, s.size);
  fail(ErrorCode::kInvalidConfig, "no parameter named " + std::string(name));
}

bool TinyNetParams::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

void save_checkpoint(const TinyNetParams& params, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::kIo, "cannot write " + path.string());
  const auto& c = params.config();
  os << "RGBDNET1\n";
  os << "resolution " << c.resolution << "\n";
  os << "widths " << c.widths[0] << " " << c.widths[1] << " " << c.widths[2] << "\n";
  os << "time_dim " << c.time_dim << "\n";
  os << "time_hidden " << c.time_hidden << "\n";
  os << "tensors " << params.slots().size() << "\n";
  for (const auto& s : params.slots()) {
    os << s.name << " ";
    for (std::size_t i = 0; i < s.shape.size(); ++i) os << (i ? "x" : "") << s.shape[i];
    os << " " << s.offset << "\n";
  }
  os << "end\n";
  for (double v : params.values()) write_u64_le(os, std::bit_cast<std::uint64_t>(v));
  if (!os) fail(ErrorCode::kIo, "write failed for " + path.string());
}

TinyNetParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::kMissingFile, "cannot open checkpoint " + path.string());
  const auto bad = [&](const std::string& why) -> void {
    fail(ErrorCode::kMalformedFile, path.string() + ": " + why);
  };
  std::string line;
  if (!std::getline(is, line) || line != "RGBDNET1") bad("bad magic");

  const auto read_kv = [&](const std::string& key) {
    if (!std::getline(is, line)) bad("truncated header");
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) bad("expected '" + key + "'");
    std::vector<long long> vals;
    long long x = 0;
    while (ls >> x) vals.push_back(x);
    if (!ls.eof()) bad("bad value for '" + key + "'");
    return vals;
  };
  TinyNetConfig cfg;
  auto v = read_kv("resolution");
  if (v.size() != 1) bad("resolution");
  cfg.resolution = static_cast<int>(v[0]);
  v = read_kv("widths");
  if (v.size() != 3) bad("widths");
  for (int i = 0; i < 3; ++i) cfg.widths[i] = static_cast<int>(v[i]);
  v = read_kv("time_dim");
  if (v.size() != 1) bad("time_dim");
  cfg.time_dim = static_cast<int>(v[0]);
  v = read_kv("time_hidden");
  if (v.size() != 1) bad("time_hidden");
  cfg.time_hidden = static_cast<int>(v[0]);
  try {
    cfg.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  v = read_kv("tensors");
  if (v.size() != 1) bad("tensors");

  TinyNetParams params = TinyNetParams::zeros(cfg);
  if (static_cast<std::size_t>(v[0]) != params.slots().size()) bad("tensor count does not match the architecture");
  for (const auto& s : params.slots()) {
    if (!std::getline(is, line)) bad("truncated manifest");
    std::ostringstream expect;
    expect << s.name << " ";
    for (std::size_t i = 0; i < s.shape.size(); ++i) expect << (i ? "x" : "") << s.shape[i];
    expect << " " << s.offset;
    if (line != expect.str()) bad("unexpected tensor entry '" + line + "'");
  }
  if (!std::getline(is, line) || line != "end") bad("missing 'end'");

  auto values = params.values();
  for (double& x : values) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) bad("truncated tensor data");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    x = std::bit_cast<double>(bits);
  }
  if (is.peek() != std::char_traits<char>::eof()) bad("trailing bytes");
  return params;
}

Image4 tiny_net_forward(const Image4& x_t, const Image4& cond, int t, const TinyNetParams& params) {
  check_inputs(params, x_t, cond);
  const Net net(params.config());
  Workspace w;
  net.forward(params.values().data(), x_t, cond, t, w);
  return output_image(w.out);
}

double tiny_net_loss(const TinyNetParams& params, const Image4& x_t, const Image4& cond, int t, const Image4& eps,
                     std::span<double> grad) {
  const Net net(params.config());
  Workspace w;
  return loss_with_workspace(net, params, x_t, cond, t, eps, grad, w);
}

Image4 TinyNetDenoiser::predict(const Image4& x_t, const Image4& cond, int t) const {
  return tiny_net_forward(x_t, cond, t, params_);
}

void TrainConfig::validate() const {
  if (!(lr_initial > 0.0) || !(lr_final > 0.0) || lr_final > lr_initial)
    fail(ErrorCode::kInvalidConfig, "learning rates must satisfy 0 < lr_final <= lr_initial");
  if (batch_size <= 0) fail(ErrorCode::kInvalidConfig, "batch_size must be positive");
  if (epochs <= 0 && steps <= 0) fail(ErrorCode::kInvalidConfig, "need a positive epoch or step count");
  if (steps < 0) fail(ErrorCode::kInvalidConfig, "steps must be non-negative");
  if (!(cond_dropout >= 0.0 && cond_dropout <= 1.0))
    fail(ErrorCode::kInvalidConfig, "cond_dropout must lie in [0, 1]");
  if (!(grad_clip >= 0.0)) fail(ErrorCode::kInvalidConfig, "grad_clip must be non-negative");
  net.validate();
}

Mask random_visibility_mask(int width, int height, Rng& rng) {
  Mask m(static_cast<std::size_t>(width) * height, 0);
  const auto kind = rng.below(4);
  if (kind == 0) return m;  // nothing visible
  if (kind == 1) {
    // Half-plane through a random point.
    const double px = rng.uniform() * width;
    const double py = rng.uniform() * height;
    const double a = rng.uniform() * 2.0 * std::numbers::pi;
    const double nx = std::cos(a);
    const double ny = std::sin(a);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        m[static_cast<std::size_t>(y) * width + x] = ((x + 0.5 - px) * nx + (y + 0.5 - py) * ny) > 0.0;
    return m;
  }
  // Visible everywhere except one or two random holes.
  std::fill(m.begin(), m.end(), 1);
  const int holes = kind == 2 ? 1 : 2;
  for (int h = 0; h < holes; ++h) {
    const int w0 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(width)));
    const int h0 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(height)));
    const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(width - w0 + 1)));
    const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(height - h0 + 1)));
    for (int y = y0; y < y0 + h0; ++y)
      for (int x = x0; x < x0 + w0; ++x) m[static_cast<std::size_t>(y) * width + x] = 0;
  }
  return m;
}

TrainResult train(std::span<const TrainSample> dataset, const TrainConfig& cfg, const NoiseSchedule& sched,
                  const TinyNetParams* init) {
  cfg.validate();
  if (dataset.empty()) fail(ErrorCode::kInvalidConfig, "empty training set");
  const int r = cfg.net.resolution;
  for (const auto& s : dataset) {
    if (s.x0.width != r || s.x0.height != r) fail(ErrorCode::kShapeMismatch, "training frame size");
    if (!s.cond.values.empty() && !s.cond.same_shape(s.x0))
      fail(ErrorCode::kShapeMismatch, "training condition size");
  }
  TrainResult result{init ? *init : TinyNetParams::random(cfg.net, derive_seed(cfg.seed, 1)), {}};
  if (result.params.config() != cfg.net) fail(ErrorCode::kInvalidConfig, "initial parameters use another config");

  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t per_epoch = (dataset.size() + batch - 1) / batch;
  const std::size_t total_steps = cfg.steps > 0 ? static_cast<std::size_t>(cfg.steps) : cfg.epochs * per_epoch;
  const std::size_t n_params = result.params.size();
  const Net net(cfg.net);

  std::vector<double> m(n_params, 0.0), v(n_params, 0.0), g(n_params);
  std::vector<std::vector<double>> grads(batch, std::vector<double>(n_params));
  std::vector<double> losses(batch);
  std::vector<Workspace> workspaces(static_cast<std::size_t>(omp_get_max_threads()));
  struct Example {
    Image4 x_t, cond, eps;
    int t = 1;
  };
  std::vector<Example> ex(batch);
  Rng rng(derive_seed(cfg.seed, 2));
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
  result.loss_history.reserve(total_steps);

  for (std::size_t step = 0; step < total_steps; ++step) {
    for (auto& e : ex) {
      const auto& s = dataset[rng.below(dataset.size())];
      e.t = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(sched.steps())));
      e.eps = Image4(r, r);
      rng.fill_normal(e.eps.values);
      const bool drop = rng.uniform() < cfg.cond_dropout;
      if (drop) {
        e.cond = Image4(r, r);
      } else if (!s.cond.values.empty()) {
        e.cond = s.cond;
      } else {
        const Mask mask = random_visibility_mask(r, r, rng);
        e.cond = Image4(r, r);
        for (std::size_t px = 0; px < mask.size(); ++px)
          if (mask[px])
            for (int c = 0; c < 4; ++c) e.cond.values[px * 4 + c] = s.x0.values[px * 4 + c];
      }
      e.x_t = forward_sample(s.x0, e.t, e.eps, sched);
    }

    const auto nb = static_cast<std::int64_t>(batch);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < nb; ++b) {
      auto& gb = grads[static_cast<std::size_t>(b)];
      std::fill(gb.begin(), gb.end(), 0.0);
      const auto& e = ex[static_cast<std::size_t>(b)];
      losses[static_cast<std::size_t>(b)] = loss_with_workspace(
          net, result.params, e.x_t, e.cond, e.t, e.eps, gb, workspaces[static_cast<std::size_t>(omp_get_thread_num())]);
    }

    double loss = 0.0;
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
      loss += losses[b];
      for (std::size_t i = 0; i < n_params; ++i) g[i] += grads[b][i];
    }
    loss /= static_cast<double>(batch);
    double norm2 = 0.0;
    for (double& x : g) {
      x /= static_cast<double>(batch);
      norm2 += x * x;
    }
    if (!std::isfinite(loss) || !std::isfinite(norm2))
      fail(ErrorCode::kTrainingDiverged, "non-finite loss at step " + std::to_string(step));
    result.loss_history.push_back(loss);

    const double norm = std::sqrt(norm2);
    const double clip = (cfg.grad_clip > 0.0 && norm > cfg.grad_clip) ? cfg.grad_clip / norm : 1.0;
    const double progress = total_steps > 1 ? static_cast<double>(step) / static_cast<double>(total_steps - 1) : 0.0;
    const double lr =
        cfg.lr_final + 0.5 * (cfg.lr_initial - cfg.lr_final) * (1.0 + std::cos(std::numbers::pi * progress));
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step + 1));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step + 1));
    auto p = result.params.values();
    for (std::size_t i = 0; i < n_params; ++i) {
      const double gi = g[i] * clip;
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * gi;
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * gi * gi;
      p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kAdamEps);
    }
    if (!result.params.all_finite())
      fail(ErrorCode::kTrainingDiverged, "non-finite parameters after step " + std::to_string(step));
  }
  return result;
}

double grad_check(const std::function<double(std::span<const double>)>& loss, std::span<const double> params,
                  std::span<const double> analytic, std::size_t count, std::uint64_t seed, double step) {
  if (analytic.size() != params.size()) fail(ErrorCode::kShapeMismatch, "gradient and parameter sizes differ");
  std::vector<double> p(params.begin(), params.end());
  std::vector<std::size_t> idx(p.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(seed);
  count = std::min(count, idx.size());
  for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
  double worst = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = idx[k];
    const double orig = p[i];
    p[i] = orig + step;
    const double up = loss(p);
    p[i] = orig - step;
    const double down = loss(p);
    p[i] = orig;
    const double fd = (up - down) / (2.0 * step);
    const double a = analytic[i];
    const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-6});
    worst = std::max(worst, rel);
  }
  return worst;
}

double grad_check(const TinyNetParams& params, const Image4& x_t, const Image4& cond, int t, const Image4& eps,
                  std::size_t count, std::uint64_t seed) {
  std::vector<double> grad(params.size(), 0.0);
  tiny_net_loss(params, x_t, cond, t, eps, grad);
  TinyNetParams probe = params;
  const auto loss = [&](std::span<const double> p) {
    std::copy(p.begin(), p.end(), probe.values().begin());
    return tiny_net_loss(probe, x_t, cond, t, eps);
  };
  return grad_check(loss, params.values(), grad, count, seed);
}

}  // namespace rgbdfill

#pragma once

// Minimal deterministic neural-net substrate: dense/conv layers with explicit
// forward/backward passes over Eigen matrices. Batches are stored one sample
// per column; image features are channel-major (c*H*W + y*W + x), matching
// acai::Image. Templated on the scalar so training runs in float while
// finite-difference checks instantiate double.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "acai/common.hpp"

namespace acai::nn {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
struct ParamRef {
    std::string name;
    Mat<T>* value;
    Mat<T>* grad;
};

enum class Act { LeakyRelu, Tanh };

// ------------------------------------------------------------------- init ---

template <class T>
void fill_normal(Mat<T>& m, std::mt19937_64& rng, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<T>(dist(rng));
}

template <class T>
Mat<T> normal_matrix(std::mt19937_64& rng, int rows, int cols, double stddev = 1.0) {
    Mat<T> m(rows, cols);
    fill_normal(m, rng, stddev);
    return m;
}

// ------------------------------------------------------------------ dense ---

template <class T>
struct Dense {
    Mat<T> W, b, gW, gb;
    Mat<T> x_cache;

    void configure(int in, int out, std::mt19937_64& rng, double gain = 1.0) {
        // He-style fan-in scaling.
        W = normal_matrix<T>(rng, out, in, gain * std::sqrt(2.0 / in));
        b = Mat<T>::Zero(out, 1);
        gW = Mat<T>::Zero(out, in);
        gb = Mat<T>::Zero(out, 1);
    }

    Mat<T> forward(const Mat<T>& x) {
        x_cache = x;
        Mat<T> y = W * x;
        y.colwise() += b.col(0);
        return y;
    }

    Mat<T> backward(const Mat<T>& dy) {
        gW.noalias() += dy * x_cache.transpose();
        gb.col(0) += dy.rowwise().sum();
        return W.transpose() * dy;
    }

    void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
        out.push_back({prefix + ".W", &W, &gW});
        out.push_back({prefix + ".b", &b, &gb});
    }
};

// ------------------------------------------------------------------- conv ---

template <class T>
struct Conv2d {
    int cin = 0, hin = 0, win = 0, cout = 0, ksize = 3, stride = 1, pad = 1;
    int hout = 0, wout = 0;
    Mat<T> W, b, gW, gb;  // W: cout x cin*k*k
    Mat<T> col_cache;     // cin*k*k x hout*wout*batch
    int batch_cache = 0;

    void configure(int cin_, int hin_, int win_, int cout_, int stride_, std::mt19937_64& rng,
                   double gain = 1.0) {
        cin = cin_;
        hin = hin_;
        win = win_;
        cout = cout_;
        stride = stride_;
        hout = (hin + 2 * pad - ksize) / stride + 1;
        wout = (win + 2 * pad - ksize) / stride + 1;
        const int fan_in = cin * ksize * ksize;
        W = normal_matrix<T>(rng, cout, fan_in, gain * std::sqrt(2.0 / fan_in));
        b = Mat<T>::Zero(cout, 1);
        gW = Mat<T>::Zero(cout, fan_in);
        gb = Mat<T>::Zero(cout, 1);
    }

    int out_dim() const { return cout * hout * wout; }
    int in_dim() const { return cin * hin * win; }

    void im2col(const Mat<T>& x) {
        const int hw = hout * wout;
        const int batch = static_cast<int>(x.cols());
        col_cache.resize(cin * ksize * ksize, static_cast<Eigen::Index>(hw) * batch);
        batch_cache = batch;
        for (int bi = 0; bi < batch; ++bi) {
            const T* src = x.col(bi).data();
            for (int oy = 0; oy < hout; ++oy) {
                for (int ox = 0; ox < wout; ++ox) {
                    T* dst = col_cache.col(static_cast<Eigen::Index>(bi) * hw + oy * wout + ox).data();
                    int r = 0;
                    for (int ci = 0; ci < cin; ++ci) {
                        const T* plane = src + static_cast<size_t>(ci) * hin * win;
                        for (int ky = 0; ky < ksize; ++ky) {
                            const int iy = oy * stride - pad + ky;
                            for (int kx = 0; kx < ksize; ++kx, ++r) {
                                const int ix = ox * stride - pad + kx;
                                dst[r] = (iy >= 0 && iy < hin && ix >= 0 && ix < win)
                                             ? plane[static_cast<size_t>(iy) * win + ix]
                                             : T(0);
                            }
                        }
                    }
                }
            }
        }
    }

    Mat<T> forward(const Mat<T>& x) {
        im2col(x);
        const int hw = hout * wout;
        Mat<T> y = W * col_cache;  // cout x hw*batch
        y.colwise() += b.col(0);
        Mat<T> out(static_cast<Eigen::Index>(cout) * hw, batch_cache);
        for (int bi = 0; bi < batch_cache; ++bi) {
            Eigen::Map<Mat<T>> view(out.col(bi).data(), hw, cout);
            view = y.middleCols(static_cast<Eigen::Index>(bi) * hw, hw).transpose();
        }
        return out;
    }

    Mat<T> backward(const Mat<T>& dy) {
        const int hw = hout * wout;
        Mat<T> dY(cout, static_cast<Eigen::Index>(hw) * batch_cache);
        for (int bi = 0; bi < batch_cache; ++bi) {
            Eigen::Map<const Mat<T>> view(dy.col(bi).data(), hw, cout);
            dY.middleCols(static_cast<Eigen::Index>(bi) * hw, hw) = view.transpose();
        }
        gW.noalias() += dY * col_cache.transpose();
        gb.col(0) += dY.rowwise().sum();

        Mat<T> dcol = W.transpose() * dY;  // cin*k*k x hw*batch
        Mat<T> dx = Mat<T>::Zero(static_cast<Eigen::Index>(cin) * hin * win, batch_cache);
        for (int bi = 0; bi < batch_cache; ++bi) {
            T* dst = dx.col(bi).data();
            for (int oy = 0; oy < hout; ++oy) {
                for (int ox = 0; ox < wout; ++ox) {
                    const T* src = dcol.col(static_cast<Eigen::Index>(bi) * hw + oy * wout + ox).data();
                    int r = 0;
                    for (int ci = 0; ci < cin; ++ci) {
                        T* plane = dst + static_cast<size_t>(ci) * hin * win;
                        for (int ky = 0; ky < ksize; ++ky) {
                            const int iy = oy * stride - pad + ky;
                            for (int kx = 0; kx < ksize; ++kx, ++r) {
                                const int ix = ox * stride - pad + kx;
                                if (iy >= 0 && iy < hin && ix >= 0 && ix < win)
                                    plane[static_cast<size_t>(iy) * win + ix] += src[r];
                            }
                        }
                    }
                }
            }
        }
        return dx;
    }

    void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
        out.push_back({prefix + ".W", &W, &gW});
        out.push_back({prefix + ".b", &b, &gb});
    }
};

// ------------------------------------------------------------- reshapeless ---

template <class T>
struct Upsample2x {
    int c = 0, h = 0, w = 0;

    void configure(int c_, int h_, int w_) {
        c = c_;
        h = h_;
        w = w_;
    }

    Mat<T> forward(const Mat<T>& x) {
        const int H = 2 * h, W2 = 2 * w;
        Mat<T> out(static_cast<Eigen::Index>(c) * H * W2, x.cols());
        for (Eigen::Index bi = 0; bi < x.cols(); ++bi) {
            const T* src = x.col(bi).data();
            T* dst = out.col(bi).data();
            for (int ci = 0; ci < c; ++ci)
                for (int y = 0; y < h; ++y)
                    for (int xx = 0; xx < w; ++xx) {
                        const T v = src[(static_cast<size_t>(ci) * h + y) * w + xx];
                        const size_t base = (static_cast<size_t>(ci) * H + 2 * y) * W2 + 2 * xx;
                        dst[base] = v;
                        dst[base + 1] = v;
                        dst[base + W2] = v;
                        dst[base + W2 + 1] = v;
                    }
        }
        return out;
    }

    Mat<T> backward(const Mat<T>& dy) {
        const int H = 2 * h, W2 = 2 * w;
        Mat<T> dx(static_cast<Eigen::Index>(c) * h * w, dy.cols());
        for (Eigen::Index bi = 0; bi < dy.cols(); ++bi) {
            const T* src = dy.col(bi).data();
            T* dst = dx.col(bi).data();
            for (int ci = 0; ci < c; ++ci)
                for (int y = 0; y < h; ++y)
                    for (int xx = 0; xx < w; ++xx) {
                        const size_t base = (static_cast<size_t>(ci) * H + 2 * y) * W2 + 2 * xx;
                        dst[(static_cast<size_t>(ci) * h + y) * w + xx] =
                            src[base] + src[base + 1] + src[base + W2] + src[base + W2 + 1];
                    }
        }
        return dx;
    }
};

template <class T>
struct GlobalAvgPool {
    int c = 0, h = 0, w = 0;

    void configure(int c_, int h_, int w_) {
        c = c_;
        h = h_;
        w = w_;
    }

    Mat<T> forward(const Mat<T>& x) {
        const int hw = h * w;
        Mat<T> out(c, x.cols());
        for (Eigen::Index bi = 0; bi < x.cols(); ++bi) {
            Eigen::Map<const Mat<T>> view(x.col(bi).data(), hw, c);
            out.col(bi) = view.colwise().mean().transpose();
        }
        return out;
    }

    Mat<T> backward(const Mat<T>& dy) {
        const int hw = h * w;
        Mat<T> dx(static_cast<Eigen::Index>(c) * hw, dy.cols());
        for (Eigen::Index bi = 0; bi < dy.cols(); ++bi) {
            Eigen::Map<Mat<T>> view(dx.col(bi).data(), hw, c);
            view = (dy.col(bi).transpose() / T(hw)).replicate(hw, 1);
        }
        return dx;
    }
};

// ------------------------------------------------------------- activations ---

template <class T>
struct Activation {
    Act kind = Act::LeakyRelu;
    T alpha = T(0.2);
    Mat<T> cache;  // input for LeakyRelu, output for Tanh

    explicit Activation(Act k = Act::LeakyRelu) : kind(k) {}

    Mat<T> forward(const Mat<T>& x) {
        if (kind == Act::LeakyRelu) {
            cache = x;
            return x.unaryExpr([a = alpha](T v) { return v > T(0) ? v : a * v; });
        }
        cache = x.array().tanh().matrix();
        return cache;
    }

    Mat<T> backward(const Mat<T>& dy) {
        if (kind == Act::LeakyRelu)
            return dy.binaryExpr(cache, [a = alpha](T g, T x) { return x > T(0) ? g : a * g; });
        return dy.binaryExpr(cache, [](T g, T y) { return g * (T(1) - y * y); });
    }
};

template <class T>
struct SigmoidLayer {
    Mat<T> out_cache;

    Mat<T> forward(const Mat<T>& x) {
        out_cache = x.unaryExpr([](T v) {
            return v >= T(0) ? T(1) / (T(1) + std::exp(-v))
                             : std::exp(v) / (T(1) + std::exp(v));
        });
        return out_cache;
    }

    Mat<T> backward(const Mat<T>& dy) {
        return dy.binaryExpr(out_cache, [](T g, T y) { return g * y * (T(1) - y); });
    }
};

// ------------------------------------------------------------------ losses ---

template <class T>
T softplus_scalar(T x) {
    return x > T(0) ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

template <class T>
T sigmoid_scalar(T x) {
    return x >= T(0) ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

template <class T>
Mat<T> log_softmax_cols(const Mat<T>& logits) {
    Mat<T> out = logits;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        const T mx = out.col(j).maxCoeff();
        const T lse = mx + std::log(out.col(j).unaryExpr([mx](T v) {
                                           return std::exp(v - mx);
                                       }).sum());
        out.col(j).array() -= lse;
    }
    return out;
}

template <class T>
Mat<T> softmax_cols(const Mat<T>& logits) {
    Mat<T> out = log_softmax_cols(logits);
    return out.array().exp().matrix();
}

// Mean cross entropy over the batch; optionally writes d(loss)/d(logits).
template <class T>
T cross_entropy_with_grad(const Mat<T>& logits, const std::vector<int>& labels, Mat<T>* dlogits) {
    if (static_cast<Eigen::Index>(labels.size()) != logits.cols())
        throw ValidationError("cross_entropy: label count must match batch");
    const T invb = T(1) / T(logits.cols());
    const Mat<T> logp = log_softmax_cols(logits);
    T loss = T(0);
    for (Eigen::Index j = 0; j < logits.cols(); ++j) loss -= logp(labels[j], j) * invb;
    if (dlogits) {
        *dlogits = logp.array().exp().matrix() * invb;
        for (Eigen::Index j = 0; j < logits.cols(); ++j) (*dlogits)(labels[j], j) -= invb;
    }
    return loss;
}

// --------------------------------------------------------------- optimizer ---

template <class T>
struct Adam {
    double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step_count = 0;
    std::vector<Mat<T>> m, v;

    void attach(const std::vector<ParamRef<T>>& ps) {
        m.clear();
        v.clear();
        for (const auto& p : ps) {
            m.push_back(Mat<T>::Zero(p.value->rows(), p.value->cols()));
            v.push_back(Mat<T>::Zero(p.value->rows(), p.value->cols()));
        }
        step_count = 0;
    }

    void step(const std::vector<ParamRef<T>>& ps) {
        if (m.size() != ps.size()) throw ValidationError("Adam: optimizer not attached");
        ++step_count;
        const T b1 = T(beta1), b2 = T(beta2);
        const T bc1 = T(1) - static_cast<T>(std::pow(beta1, step_count));
        const T bc2 = T(1) - static_cast<T>(std::pow(beta2, step_count));
        for (size_t i = 0; i < ps.size(); ++i) {
            const auto& g = *ps[i].grad;
            m[i] = b1 * m[i] + (T(1) - b1) * g;
            v[i] = (b2 * v[i].array() + (T(1) - b2) * g.array().square()).matrix();
            ps[i].value->array() -=
                T(lr) * (m[i].array() / bc1) / ((v[i].array() / bc2).sqrt() + T(eps));
        }
    }
};

template <class T>
void zero_grads(const std::vector<ParamRef<T>>& ps) {
    for (const auto& p : ps) p.grad->setZero();
}

// ---------------------------------------------------- finite-diff checking ---

template <class T>
std::vector<T> flatten_values(const std::vector<ParamRef<T>>& ps) {
    std::vector<T> out;
    for (const auto& p : ps)
        out.insert(out.end(), p.value->data(), p.value->data() + p.value->size());
    return out;
}

template <class T>
void assign_values(const std::vector<ParamRef<T>>& ps, const std::vector<T>& vals) {
    size_t k = 0;
    for (const auto& p : ps) {
        std::copy(vals.begin() + k, vals.begin() + k + p.value->size(), p.value->data());
        k += p.value->size();
    }
}

template <class T>
std::vector<T> flatten_grads(const std::vector<ParamRef<T>>& ps) {
    std::vector<T> out;
    for (const auto& p : ps)
        out.insert(out.end(), p.grad->data(), p.grad->data() + p.grad->size());
    return out;
}

// Compares analytic gradients (computed by `backward_fn`) against central
// finite differences of `loss_fn` on up to n_probe randomly chosen
// coordinates. Returns the max relative error.
template <class T>
double max_rel_grad_error(const std::vector<ParamRef<T>>& ps,
                          const std::function<double()>& loss_fn,
                          const std::function<void()>& backward_fn, int n_probe,
                          std::mt19937_64& rng, double fd_eps = 1e-5) {
    zero_grads(ps);
    backward_fn();
    const std::vector<T> analytic = flatten_grads(ps);
    std::vector<T> theta = flatten_values(ps);

    const size_t dim = theta.size();
    std::vector<size_t> idx(dim);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    const size_t probes = std::min<size_t>(static_cast<size_t>(n_probe), dim);

    double worst = 0.0;
    for (size_t p = 0; p < probes; ++p) {
        const size_t i = idx[p];
        const T saved = theta[i];
        theta[i] = saved + static_cast<T>(fd_eps);
        assign_values(ps, theta);
        const double fp = loss_fn();
        theta[i] = saved - static_cast<T>(fd_eps);
        assign_values(ps, theta);
        const double fm = loss_fn();
        theta[i] = saved;
        assign_values(ps, theta);

        const double numeric = (fp - fm) / (2.0 * fd_eps);
        const double a = static_cast<double>(analytic[i]);
        const double denom = std::max(std::abs(a), std::abs(numeric));
        if (denom < 1e-10) continue;
        worst = std::max(worst, std::abs(a - numeric) / denom);
    }
    return worst;
}

}  // namespace acai::nn
